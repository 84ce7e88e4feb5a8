#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace fracsol {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

enum class DomainKind {
    rectangle,
    strip,
    parallelogram,
    equilateral_triangle,
    triangle_30_60_90,
};

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Geometry of the computational cell in unit coordinates; the physical
/// domain is the dilation by `scale`.
///
/// rectangle: a = L1, b = L2.  strip: a = width (2R), b = truncation (2L).
/// parallelogram: generators h1, h2.  equilateral_triangle: a = side.
/// triangle_30_60_90: a = hypotenuse, vertices X (pi/6), Y (pi/3), Z (pi/2).
struct DomainSpec {
    DomainKind kind = DomainKind::rectangle;
    double a = 1.0;
    double b = 1.0;
    Vec2 h1{1.0, 0.0};
    Vec2 h2{0.0, 1.0};
    double scale = 1.0;

    static DomainSpec rectangle(double l1, double l2, double scale = 1.0);
    static DomainSpec strip(double width, double length, double scale = 1.0);
    static DomainSpec parallelogram(Vec2 h1, Vec2 h2, double scale = 1.0);
    static DomainSpec equilateral_triangle(double side, double scale = 1.0);
    static DomainSpec triangle_30_60_90(double hypotenuse, double scale = 1.0);

    /// Throws a validation error when an invariant is violated.
    void validate() const;

    bool is_triangle() const {
        return kind == DomainKind::equilateral_triangle || kind == DomainKind::triangle_30_60_90;
    }
    bool is_rectangular() const {
        return kind == DomainKind::rectangle || kind == DomainKind::strip;
    }

    /// Physical lattice vectors of the periodic computational cell.
    std::array<Vec2, 2> cell_vectors() const;
    double cell_area() const;
    /// Area of one fundamental-domain copy (the polygon itself).
    double fundamental_area() const;
    /// Grid dimensions must be multiples of this for the mirror group to act on nodes.
    int compatibility_factor() const;
};

struct NamedPoint {
    std::string name;
    Vec2 p;
};

/// Vertices of the fundamental polygon in physical coordinates, in boundary order.
std::vector<NamedPoint> vertices(const DomainSpec& domain);

enum class Regime { neumann, dirichlet, periodic, quasi_periodic, mixed_dn };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

struct BoundaryCondition {
    Regime regime = Regime::neumann;
    double theta1 = 0.0;  // quasi-periodic phases, stored modulo 2 pi
    double theta2 = 0.0;
    int dirichlet_axis = 0;  // mixed_dn: axis carrying the sine transform

    static BoundaryCondition neumann() { return {Regime::neumann}; }
    static BoundaryCondition dirichlet() { return {Regime::dirichlet}; }
    static BoundaryCondition periodic() { return {Regime::periodic}; }
    static BoundaryCondition quasi_periodic(double t1, double t2);
    static BoundaryCondition mixed_dn(int dirichlet_axis);

    /// True when the operator maps real fields to real fields.
    bool preserves_real() const;
};

/// Structured grid over the computational cell.  Node (i, j) sits at
/// origin + (i + offset) * step0 + (j + offset) * step1 and carries the
/// uniform quadrature weight |det(step0, step1)|.  Storage is row-major:
/// index = i * dims[1] + j.
struct Grid {
    std::array<int, 2> dims{0, 0};
    Vec2 origin;
    Vec2 step0;
    Vec2 step1;
    double offset = 0.5;
    double weight = 0.0;
    bool torus = false;  // the cell is a periodic torus by construction (triangles, parallelograms)
    DomainSpec domain;

    std::size_t size() const { return static_cast<std::size_t>(dims[0]) * dims[1]; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * dims[1] + j; }
    Vec2 position(int i, int j) const {
        return origin + (i + offset) * step0 + (j + offset) * step1;
    }
    Vec2 lattice0() const { return static_cast<double>(dims[0]) * step0; }
    Vec2 lattice1() const { return static_cast<double>(dims[1]) * step1; }
    double area() const { return weight * static_cast<double>(size()); }
    /// Mean node spacing, sqrt of the cell area per node.
    double spacing() const { return std::sqrt(weight); }
    /// Shortest representative of d modulo the cell lattice.
    Vec2 min_image(Vec2 d) const;
    bool same_shape(const Grid& other) const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Grid with `resolution` nodes per unit physical length along each cell vector.
GridPtr build_grid(const DomainSpec& domain, double resolution);
/// Grid with explicit dimensions.
GridPtr build_grid_dims(const DomainSpec& domain, std::array<int, 2> dims);

enum class Character { even, odd };

/// Node permutation with a scalar character: (g u)[perm[n]] = character * u[n].
struct GroupElement {
    std::string name;
    std::vector<int> perm;
    std::complex<double> character{1.0, 0.0};
};

struct SymmetryGroup {
    std::vector<GroupElement> elements;

    std::size_t order() const { return elements.size(); }
    /// Index of the element equal to a*b (apply b first), or -1.
    int compose_index(std::size_t a, std::size_t b) const;
    bool is_closed() const;
};

/// Point group of the fundamental polygon acting on the grid.  Rectangles and
/// strips use the mirrors about the cell center lines; `axes` restricts which
/// mirrors generate the group (bit 0: axis 0, bit 1: axis 1).
SymmetryGroup symmetry_group(const Grid& grid, Character character, unsigned axes = 3U);

/// Nodes of one fundamental-polygon copy inside the computational cell.
std::vector<char> fundamental_mask(const Grid& grid);

}  // namespace fracsol
