#pragma once

#include <array>
#include <string>
#include <vector>

#include "fracsol/energy.hpp"
#include "fracsol/solver.hpp"

namespace fracsol {

enum class TilingMode { even, odd, mixed, quasi_phase };

std::string to_string(TilingMode mode);
TilingMode tiling_mode_from_string(const std::string& name);

struct TilingSpec {
    TilingMode mode = TilingMode::even;
    int dirichlet_axis = 0;         // mixed
    double theta1 = 0.0;            // quasi_phase
    double theta2 = 0.0;
    std::array<int, 2> copies{2, 2};

    void validate() const;
};

/// Field on the enlarged cell with the boundary condition it satisfies there.
struct Extended {
    Field field;
    BoundaryCondition bc;
};

Extended extend(const Field& u, const BoundaryCondition& bc, const TilingSpec& spec);
Extended extend(const Solution& sol, const TilingSpec& spec);

struct ExtensionCheck {
    Residual residual;
    double fundamental_residual = 0.0;
    bool accepted = false;
};

/// Euler-Lagrange residual on the big cell with its periodic (Bloch) symbol.
ExtensionCheck verify_extension(const Extended& ext, double s, double q, double fundamental_residual);

struct StructurePoint {
    Vec2 position;
    double density = 0.0;
    int sign = 1;        // real fields
    double phase = 0.0;  // complex fields
};

/// Local maxima of |u|^q above half the global maximum, merged within two cells.
std::vector<StructurePoint> structure_map(const Field& u, double q, bool periodic = true);

}  // namespace fracsol
