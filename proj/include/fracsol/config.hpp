#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsol/solver.hpp"
#include "fracsol/tiling.hpp"

namespace fracsol {

struct StVerifyConfig {
    int nodes = 400;
    double reach = 30.0;
    int fields = 3;
    std::vector<double> r_list;  // empty: four doublings from 1/16 of the cell diameter
};

/// Parsed run configuration.  s, q, domain.scale and the seed have no defaults.
struct RunConfig {
    DomainSpec domain;
    BoundaryCondition bc;
    std::optional<double> resolution;
    std::optional<std::array<int, 2>> dims;
    SolveOptions solve;
    bool have_seed = false;
    std::vector<double> R_list;
    bool warm_start = false;
    std::optional<TilingSpec> tiling;
    double eps = 0.01;
    StVerifyConfig stverify;
    std::string name = "solution";
    std::filesystem::path base_dir;  // directory of the config file, for relative paths

    GridPtr grid_for(const DomainSpec& domain) const;
};

/// Throws a validation error naming the offending line or key path.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace fracsol
