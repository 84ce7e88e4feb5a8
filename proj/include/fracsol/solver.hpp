#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsol/diagnostics.hpp"
#include "fracsol/energy.hpp"

namespace fracsol {

/// multi_start runs a corner_bump at every vertex and then constant_plus_noise, keeping the lowest quotient.
enum class InitKind { constant_plus_noise, corner_bump, file, multi_start };

std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

struct InitSpec {
    InitKind kind = InitKind::constant_plus_noise;
    double amplitude = 0.1;   // constant_plus_noise: uniform noise in [-amplitude, amplitude]
    std::string vertex;       // corner_bump: vertex name; empty means `point`
    Vec2 point;
    double width = 1.0;       // corner_bump / multi_start: Gaussian width in physical units
    std::optional<Field> field;  // file
};

/// Upper bound on the q-mass fraction inside B_radius(center) and its group images.
struct MassConstraint {
    std::string vertex;  // vertex name; empty means `point`
    Vec2 point;
    double radius = -1.0;   // <= 0: R/4 with R = scale * a
    double theta_q = -1.0;  // <= 0: default_theta(q)
};

struct SolveConfig {
    EnergyParams params;
    int max_iters = 4000;
    double tol_J = 1e-12;
    double tol_residual = 1e-8;
    InitSpec init;
    std::uint64_t seed = 0;
    bool enforce_positivity = true;
    std::optional<SymmetryGroup> symmetrize;
    bool radialize = false;
    std::vector<MassConstraint> constraints;

    void validate() const;
};

struct Solution {
    Field field;  // Nehari-normalized
    BoundaryCondition bc;
    double lambda = 0.0;
    Residual residual;
    int iterations = 0;
    bool converged = false;
    std::vector<bool> constraint_active;
    std::vector<double> constraint_fraction;  // final ball mass fractions
    std::vector<double> history;               // J after each accepted step
};

/// Largest theta with (theta/(1-theta))^{1-2/q} 2^{2/q} = 1/2.
double default_theta(double q);

/// Projected gradient descent on the unit Lq sphere.
Solution minimize(const SolveConfig& cfg);
Solution minimize(GridPtr grid, const BoundaryCondition& bc, SolveConfig cfg);
/// Same iteration with the vertex-mass constraints active.
Solution minimize_constrained(const SolveConfig& cfg);

/// Grid-independent description of a run, turned into a SolveConfig per grid.
struct SolveOptions {
    double s = 0.5;
    double q = 4.0;
    int max_iters = 4000;
    double tol_J = 1e-12;
    double tol_residual = 1e-8;
    InitSpec init;
    std::uint64_t seed = 0;
    bool enforce_positivity = true;
    /// Group averaging: "none", "even", "odd", or "auto" (the triangle's own
    /// character for triangle kinds, none otherwise).
    std::string symmetrize = "auto";
    unsigned symmetry_axes = 3U;
    bool radialize = false;
    std::vector<MassConstraint> constraints;
};

SolveConfig make_config(GridPtr grid, const BoundaryCondition& bc, const SolveOptions& opt);

struct SweepEntry {
    double R = 0.0;
    bool ok = false;
    std::string error;
    Solution solution;
    ConcentrationReport report;
};

struct SweepConfig {
    DomainSpec family;  // scale is replaced by each R
    BoundaryCondition bc;
    double resolution = 8.0;                   // nodes per unit length, or
    std::optional<std::array<int, 2>> dims;    // fixed dims for every R
    SolveOptions options;
    bool warm_start = false;
    int threads = 1;
    double eps = 0.01;
};

/// Concentration report with the fundamental mask for triangles and vertex distances where defined.
ConcentrationReport solution_report(const Solution& sol, double q, double eps);

/// Solves for every R; failures are recorded per entry and the sweep continues.
std::vector<SweepEntry> sweep_R(const SweepConfig& cfg, const std::vector<double>& R_list);

/// Bilinear resampling of u onto `target` in cell-fraction coordinates.
Field rescale_field(const Field& u, const GridPtr& target);

struct Reallocation {
    Field field;
    bool swapped = false;  // b and c were exchanged to satisfy the quotient ordering
};

/// U = a + ((||b||_q^q + ||c||_q^q)^{1/q} / ||c||_q) c.
Reallocation bubble_reallocation(const Field& a, const Field& b, const Field& c, const EnergyParams& p);

/// Strip runs: q-mass fraction in the outer 10% of the long axis at both ends.
double strip_tail_fraction(const Field& u, double q);

}  // namespace fracsol
