#include "fracsol/domain.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "fracsol/error.hpp"

namespace fracsol {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    // fmod can return exactly 2 pi after the shift for tiny negative inputs
    if (t >= kTwoPi) t = 0.0;
    return t;
}

bool is_zero_or_pi(double theta) {
    return theta == 0.0 || std::abs(theta - std::numbers::pi) < 1e-15;
}

}  // namespace

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::rectangle: return "rectangle";
        case DomainKind::strip: return "strip";
        case DomainKind::parallelogram: return "parallelogram";
        case DomainKind::equilateral_triangle: return "equilateral_triangle";
        case DomainKind::triangle_30_60_90: return "triangle_30_60_90";
    }
    return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
    for (auto kind : {DomainKind::rectangle, DomainKind::strip, DomainKind::parallelogram,
                      DomainKind::equilateral_triangle, DomainKind::triangle_30_60_90}) {
        if (to_string(kind) == name) return kind;
    }
    fail_validation("unknown domain kind '" + name + "'");
}

DomainSpec DomainSpec::rectangle(double l1, double l2, double scale) {
    DomainSpec d;
    d.kind = DomainKind::rectangle;
    d.a = l1;
    d.b = l2;
    d.scale = scale;
    return d;
}

DomainSpec DomainSpec::strip(double width, double length, double scale) {
    DomainSpec d = rectangle(width, length, scale);
    d.kind = DomainKind::strip;
    return d;
}

DomainSpec DomainSpec::parallelogram(Vec2 h1, Vec2 h2, double scale) {
    DomainSpec d;
    d.kind = DomainKind::parallelogram;
    d.h1 = h1;
    d.h2 = h2;
    d.scale = scale;
    return d;
}

DomainSpec DomainSpec::equilateral_triangle(double side, double scale) {
    DomainSpec d;
    d.kind = DomainKind::equilateral_triangle;
    d.a = side;
    d.scale = scale;
    return d;
}

DomainSpec DomainSpec::triangle_30_60_90(double hypotenuse, double scale) {
    DomainSpec d;
    d.kind = DomainKind::triangle_30_60_90;
    d.a = hypotenuse;
    d.scale = scale;
    return d;
}

void DomainSpec::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) fail_validation("domain scale must be positive");
    switch (kind) {
        case DomainKind::rectangle:
        case DomainKind::strip:
            if (!(a > 0.0) || !(b > 0.0)) fail_validation("domain side lengths must be positive");
            if (kind == DomainKind::strip && b < 8.0 * a) {
                fail_validation("strip truncation 2L must be at least 8x the width 2R");
            }
            break;
        case DomainKind::parallelogram:
            if (!(std::abs(cross(h1, h2)) > 1e-12 * norm(h1) * norm(h2))) {
                fail_validation("parallelogram generators must be linearly independent");
            }
            break;
        case DomainKind::equilateral_triangle:
        case DomainKind::triangle_30_60_90:
            if (!(a > 0.0)) fail_validation("triangle size must be positive");
            break;
    }
}

std::array<Vec2, 2> DomainSpec::cell_vectors() const {
    const double r = scale;
    switch (kind) {
        case DomainKind::rectangle:
        case DomainKind::strip:
            return {Vec2{r * a, 0.0}, Vec2{0.0, r * b}};
        case DomainKind::parallelogram:
            return {r * h1, r * h2};
        case DomainKind::equilateral_triangle: {
            // translations of the reflection group: length sqrt(3)*side at 30 and 90 degrees
            const double s = r * a;
            return {Vec2{1.5 * s, 0.5 * kSqrt3 * s}, Vec2{0.0, kSqrt3 * s}};
        }
        case DomainKind::triangle_30_60_90: {
            const double h = r * a;
            return {Vec2{kSqrt3 * h, 0.0}, Vec2{0.5 * kSqrt3 * h, 1.5 * h}};
        }
    }
    return {};
}

double DomainSpec::cell_area() const {
    const auto v = cell_vectors();
    return std::abs(cross(v[0], v[1]));
}

double DomainSpec::fundamental_area() const {
    switch (kind) {
        case DomainKind::equilateral_triangle: return cell_area() / 6.0;
        case DomainKind::triangle_30_60_90: return cell_area() / 12.0;
        default: return cell_area();
    }
}

int DomainSpec::compatibility_factor() const {
    switch (kind) {
        case DomainKind::equilateral_triangle: return 3;
        case DomainKind::triangle_30_60_90: return 6;
        default: return 1;
    }
}

std::vector<NamedPoint> vertices(const DomainSpec& domain) {
    const double r = domain.scale;
    switch (domain.kind) {
        case DomainKind::rectangle:
        case DomainKind::strip: {
            const double w = r * domain.a;
            const double h = r * domain.b;
            return {{"v0", {0.0, 0.0}}, {"v1", {w, 0.0}}, {"v2", {w, h}}, {"v3", {0.0, h}}};
        }
        case DomainKind::parallelogram: {
            const Vec2 p = r * domain.h1;
            const Vec2 q = r * domain.h2;
            return {{"v0", {0.0, 0.0}}, {"v1", p}, {"v2", p + q}, {"v3", q}};
        }
        case DomainKind::equilateral_triangle: {
            const double s = r * domain.a;
            return {{"A", {0.0, 0.0}}, {"B", {s, 0.0}}, {"C", {0.5 * s, 0.5 * kSqrt3 * s}}};
        }
        case DomainKind::triangle_30_60_90: {
            const double h = r * domain.a;
            return {{"X", {0.0, 0.0}}, {"Z", {0.5 * kSqrt3 * h, 0.0}}, {"Y", {0.5 * kSqrt3 * h, 0.5 * h}}};
        }
    }
    return {};
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::neumann: return "neumann";
        case Regime::dirichlet: return "dirichlet";
        case Regime::periodic: return "periodic";
        case Regime::quasi_periodic: return "quasi_periodic";
        case Regime::mixed_dn: return "mixed_dn";
    }
    return "unknown";
}

Regime regime_from_string(const std::string& name) {
    for (auto r : {Regime::neumann, Regime::dirichlet, Regime::periodic, Regime::quasi_periodic,
                   Regime::mixed_dn}) {
        if (to_string(r) == name) return r;
    }
    fail_validation("unknown boundary regime '" + name + "'");
}

BoundaryCondition BoundaryCondition::quasi_periodic(double t1, double t2) {
    BoundaryCondition bc{Regime::quasi_periodic};
    bc.theta1 = wrap_phase(t1);
    bc.theta2 = wrap_phase(t2);
    return bc;
}

BoundaryCondition BoundaryCondition::mixed_dn(int axis) {
    if (axis != 0 && axis != 1) fail_validation("mixed_dn dirichlet_axis must be 0 or 1");
    BoundaryCondition bc{Regime::mixed_dn};
    bc.dirichlet_axis = axis;
    return bc;
}

bool BoundaryCondition::preserves_real() const {
    if (regime != Regime::quasi_periodic) return true;
    return is_zero_or_pi(theta1) && is_zero_or_pi(theta2);
}

Vec2 Grid::min_image(Vec2 d) const {
    const Vec2 l0 = lattice0();
    const Vec2 l1 = lattice1();
    const double det = cross(l0, l1);
    // skew coordinates of d in the lattice basis
    const double c0 = cross(d, l1) / det;
    const double c1 = cross(l0, d) / det;
    const Vec2 base = d - std::round(c0) * l0 - std::round(c1) * l1;
    Vec2 best = base;
    double best_n = dot(base, base);
    for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
            const Vec2 cand = base + static_cast<double>(a) * l0 + static_cast<double>(b) * l1;
            const double n = dot(cand, cand);
            if (n < best_n - 1e-15 * best_n) {
                best_n = n;
                best = cand;
            }
        }
    }
    return best;
}

bool Grid::same_shape(const Grid& other) const {
    return dims == other.dims && step0 == other.step0 && step1 == other.step1 &&
           offset == other.offset;
}

GridPtr build_grid_dims(const DomainSpec& domain, std::array<int, 2> dims) {
    domain.validate();
    if (dims[0] < 8 || dims[1] < 8) {
        std::ostringstream os;
        os << "grid resolution too coarse: dims " << dims[0] << "x" << dims[1]
           << ", need at least 8 nodes per axis";
        fail_validation(os.str());
    }
    auto grid = std::make_shared<Grid>();
    grid->dims = dims;
    grid->domain = domain;
    const auto cell = domain.cell_vectors();
    grid->step0 = (1.0 / dims[0]) * cell[0];
    grid->step1 = (1.0 / dims[1]) * cell[1];
    grid->origin = {0.0, 0.0};
    if (domain.is_rectangular()) {
        grid->offset = 0.5;
        grid->torus = false;
    } else {
        // vertex grids: triangle mirrors pass through nodes of a triangular lattice
        grid->offset = 0.0;
        grid->torus = true;
    }
    if (domain.is_triangle()) {
        const int f = domain.compatibility_factor();
        if (dims[0] != dims[1] || dims[0] % f != 0) {
            std::ostringstream os;
            os << "triangle grid dims " << dims[0] << "x" << dims[1]
               << " must be equal and divisible by " << f;
            fail_validation(os.str());
        }
    }
    grid->weight = std::abs(cross(grid->step0, grid->step1));
    return grid;
}

GridPtr build_grid(const DomainSpec& domain, double resolution) {
    domain.validate();
    if (!(resolution > 0.0)) fail_validation("resolution must be positive");
    const auto cell = domain.cell_vectors();
    const int n0 = static_cast<int>(std::lround(resolution * norm(cell[0])));
    const int n1 = static_cast<int>(std::lround(resolution * norm(cell[1])));
    return build_grid_dims(domain, {n0, n1});
}

int SymmetryGroup::compose_index(std::size_t a, std::size_t b) const {
    const auto& ga = elements[a];
    const auto& gb = elements[b];
    const std::size_t n = ga.perm.size();
    std::vector<int> perm(n);
    for (std::size_t k = 0; k < n; ++k) perm[k] = ga.perm[static_cast<std::size_t>(gb.perm[k])];
    const auto chi = ga.character * gb.character;
    for (std::size_t c = 0; c < elements.size(); ++c) {
        if (elements[c].perm == perm && std::abs(elements[c].character - chi) < 1e-12) {
            return static_cast<int>(c);
        }
    }
    return -1;
}

bool SymmetryGroup::is_closed() const {
    bool has_identity = false;
    for (const auto& g : elements) {
        bool id = std::abs(g.character - 1.0) < 1e-12;
        for (std::size_t k = 0; id && k < g.perm.size(); ++k) id = g.perm[k] == static_cast<int>(k);
        has_identity = has_identity || id;
    }
    if (!has_identity) return false;
    for (std::size_t a = 0; a < elements.size(); ++a) {
        for (std::size_t b = 0; b < elements.size(); ++b) {
            if (compose_index(a, b) < 0) return false;
        }
    }
    return true;
}

namespace {

SymmetryGroup mirror_group(const Grid& grid, Character character, unsigned axes) {
    const int n0 = grid.dims[0];
    const int n1 = grid.dims[1];
    SymmetryGroup group;
    for (int fx = 0; fx <= 1; ++fx) {
        for (int fy = 0; fy <= 1; ++fy) {
            if ((fx && !(axes & 1U)) || (fy && !(axes & 2U))) continue;
            GroupElement g;
            g.name = fx && fy ? "mirror_xy" : fx ? "mirror_x" : fy ? "mirror_y" : "id";
            g.perm.resize(grid.size());
            for (int i = 0; i < n0; ++i) {
                for (int j = 0; j < n1; ++j) {
                    const int ii = fx ? n0 - 1 - i : i;
                    const int jj = fy ? n1 - 1 - j : j;
                    g.perm[grid.index(i, j)] = static_cast<int>(grid.index(ii, jj));
                }
            }
            const bool flip = character == Character::odd && ((fx + fy) % 2 == 1);
            g.character = flip ? -1.0 : 1.0;
            group.elements.push_back(std::move(g));
        }
    }
    return group;
}

// Orthogonal point-group elements about the origin: rotations by k*(2pi/n) and
// mirrors across lines at angle k*(pi/n).
SymmetryGroup dihedral_group(const Grid& grid, int n, Character character) {
    const Vec2 t0 = grid.lattice0();
    const Vec2 t1 = grid.lattice1();
    const double det = cross(t0, t1);
    const int nn = grid.dims[0];
    SymmetryGroup group;
    for (int refl = 0; refl <= 1; ++refl) {
        for (int k = 0; k < n; ++k) {
            double m00, m01, m10, m11;
            if (refl == 0) {
                const double a = kTwoPi * k / n;
                m00 = std::cos(a); m01 = -std::sin(a); m10 = std::sin(a); m11 = std::cos(a);
            } else {
                const double b = std::numbers::pi * k / n;
                m00 = std::cos(2 * b); m01 = std::sin(2 * b); m10 = std::sin(2 * b); m11 = -std::cos(2 * b);
            }
            auto apply = [&](Vec2 v) { return Vec2{m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; };
            // integer matrix of the map in the lattice basis
            int im[2][2];
            const Vec2 cols[2] = {apply(t0), apply(t1)};
            for (int c = 0; c < 2; ++c) {
                const double s0 = cross(cols[c], t1) / det;
                const double s1 = cross(t0, cols[c]) / det;
                im[0][c] = static_cast<int>(std::lround(s0));
                im[1][c] = static_cast<int>(std::lround(s1));
                if (std::abs(s0 - im[0][c]) > 1e-9 || std::abs(s1 - im[1][c]) > 1e-9) {
                    fail_validation("grid lattice is not invariant under the point group");
                }
            }
            GroupElement g;
            g.name = (refl ? "mirror" : "rot") + std::to_string(refl ? 180 * k / n : 360 * k / n);
            g.perm.resize(grid.size());
            for (int i = 0; i < nn; ++i) {
                for (int j = 0; j < nn; ++j) {
                    int ii = (im[0][0] * i + im[0][1] * j) % nn;
                    int jj = (im[1][0] * i + im[1][1] * j) % nn;
                    if (ii < 0) ii += nn;
                    if (jj < 0) jj += nn;
                    g.perm[grid.index(i, j)] = static_cast<int>(grid.index(ii, jj));
                }
            }
            g.character = (character == Character::odd && refl) ? -1.0 : 1.0;
            group.elements.push_back(std::move(g));
        }
    }
    return group;
}

bool inside_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double tol) {
    const double d1 = cross(b - a, p - a);
    const double d2 = cross(c - b, p - b);
    const double d3 = cross(a - c, p - c);
    const bool has_neg = d1 < -tol || d2 < -tol || d3 < -tol;
    const bool has_pos = d1 > tol || d2 > tol || d3 > tol;
    return !(has_neg && has_pos);
}

}  // namespace

SymmetryGroup symmetry_group(const Grid& grid, Character character, unsigned axes) {
    switch (grid.domain.kind) {
        case DomainKind::rectangle:
        case DomainKind::strip:
            return mirror_group(grid, character, axes);
        case DomainKind::equilateral_triangle:
            return dihedral_group(grid, 3, character);
        case DomainKind::triangle_30_60_90:
            return dihedral_group(grid, 6, character);
        case DomainKind::parallelogram:
            break;
    }
    fail_validation("no reflection group for domain kind " + to_string(grid.domain.kind));
}

std::vector<char> fundamental_mask(const Grid& grid) {
    std::vector<char> mask(grid.size(), 1);
    if (!grid.domain.is_triangle()) return mask;
    const auto v = vertices(grid.domain);
    const double tol = 1e-9 * grid.domain.scale * grid.domain.a * grid.domain.a;
    const Vec2 l0 = grid.lattice0();
    const Vec2 l1 = grid.lattice1();
    for (int i = 0; i < grid.dims[0]; ++i) {
        for (int j = 0; j < grid.dims[1]; ++j) {
            const Vec2 p = grid.position(i, j);
            bool in = false;
            for (int a = -1; a <= 1 && !in; ++a) {
                for (int b = -1; b <= 1 && !in; ++b) {
                    const Vec2 q = p + static_cast<double>(a) * l0 + static_cast<double>(b) * l1;
                    in = inside_triangle(q, v[0].p, v[1].p, v[2].p, tol);
                }
            }
            mask[grid.index(i, j)] = in ? 1 : 0;
        }
    }
    return mask;
}

}  // namespace fracsol
