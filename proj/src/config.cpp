#include "fracsol/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fracsol/error.hpp"
#include "fracsol/io.hpp"

namespace fracsol {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail_validation("config: '" + where + "' must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) fail_validation("config: unknown key '" + where + "." + k + "'");
    }
}

template <class T>
T get(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) fail_validation("config: missing required key '" + where + "." + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail_validation("config: key '" + where + "." + key + "' has the wrong type");
    }
}

template <class T>
T get_or(const json& j, const std::string& where, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return get<T>(j, where, key);
}

Vec2 get_vec(const json& j, const std::string& where, const char* key) {
    const auto v = get<std::vector<double>>(j, where, key);
    if (v.size() != 2) fail_validation("config: '" + where + "." + key + "' must have two entries");
    return {v[0], v[1]};
}

DomainSpec parse_domain(const json& j) {
    only_keys(j, "domain", {"kind", "scale", "L1", "L2", "width", "length", "h1", "h2", "side", "hypotenuse"});
    const std::string kind = get<std::string>(j, "domain", "kind");
    const double scale = get<double>(j, "domain", "scale");
    DomainSpec d;
    if (kind == "rectangle") {
        d = DomainSpec::rectangle(get_or(j, "domain", "L1", 1.0), get_or(j, "domain", "L2", 1.0), scale);
    } else if (kind == "strip") {
        d = DomainSpec::strip(get<double>(j, "domain", "width"), get<double>(j, "domain", "length"), scale);
    } else if (kind == "parallelogram") {
        d = DomainSpec::parallelogram(get_vec(j, "domain", "h1"), get_vec(j, "domain", "h2"), scale);
    } else if (kind == "equilateral_triangle") {
        d = DomainSpec::equilateral_triangle(get_or(j, "domain", "side", 1.0), scale);
    } else if (kind == "triangle_30_60_90") {
        d = DomainSpec::triangle_30_60_90(get_or(j, "domain", "hypotenuse", 1.0), scale);
    } else {
        fail_validation("config: unknown domain.kind '" + kind + "'");
    }
    d.validate();
    return d;
}

BoundaryCondition parse_bc(const json& j) {
    only_keys(j, "bc", {"regime", "theta", "dirichlet_axis"});
    const std::string r = get<std::string>(j, "bc", "regime");
    const Regime regime = regime_from_string(r);
    switch (regime) {
        case Regime::quasi_periodic: {
            const Vec2 t = get_vec(j, "bc", "theta");
            return BoundaryCondition::quasi_periodic(t.x, t.y);
        }
        case Regime::mixed_dn: return BoundaryCondition::mixed_dn(get<int>(j, "bc", "dirichlet_axis"));
        case Regime::neumann: return BoundaryCondition::neumann();
        case Regime::dirichlet: return BoundaryCondition::dirichlet();
        case Regime::periodic: return BoundaryCondition::periodic();
    }
    return {};
}

InitSpec parse_init(const json& j, const std::filesystem::path& base) {
    only_keys(j, "solver.init", {"kind", "amplitude", "vertex", "point", "width", "file"});
    InitSpec init;
    init.kind = init_kind_from_string(get<std::string>(j, "solver.init", "kind"));
    init.amplitude = get_or(j, "solver.init", "amplitude", init.amplitude);
    init.vertex = get_or<std::string>(j, "solver.init", "vertex", "");
    if (j.contains("point")) init.point = get_vec(j, "solver.init", "point");
    init.width = get_or(j, "solver.init", "width", init.width);
    if (init.kind == InitKind::corner_bump && init.vertex.empty() && !j.contains("point")) {
        fail_validation("config: corner_bump init needs 'vertex' or 'point'");
    }
    if (init.kind == InitKind::file) {
        std::filesystem::path p = get<std::string>(j, "solver.init", "file");
        if (p.is_relative()) p = base / p;
        init.field = read_field_file(p).field;
    }
    return init;
}

void parse_solver(const json& j, SolveOptions& o, const std::filesystem::path& base) {
    only_keys(j, "solver", {"max_iters", "tol_J", "tol_residual", "init", "enforce_positivity", "symmetrize",
                            "symmetry_axes", "radialize", "constraints"});
    o.max_iters = get_or(j, "solver", "max_iters", o.max_iters);
    o.tol_J = get_or(j, "solver", "tol_J", o.tol_J);
    o.tol_residual = get_or(j, "solver", "tol_residual", o.tol_residual);
    if (j.contains("init")) o.init = parse_init(j.at("init"), base);
    o.enforce_positivity = get_or(j, "solver", "enforce_positivity", o.enforce_positivity);
    o.symmetrize = get_or(j, "solver", "symmetrize", o.symmetrize);
    o.symmetry_axes = get_or(j, "solver", "symmetry_axes", o.symmetry_axes);
    o.radialize = get_or(j, "solver", "radialize", o.radialize);
    if (j.contains("constraints")) {
        const auto& list = j.at("constraints");
        if (!list.is_array()) fail_validation("config: 'solver.constraints' must be an array");
        for (const auto& c : list) {
            only_keys(c, "solver.constraints[]", {"vertex", "point", "radius", "theta_q"});
            MassConstraint mc;
            mc.vertex = get_or<std::string>(c, "solver.constraints[]", "vertex", "");
            if (c.contains("point")) mc.point = get_vec(c, "solver.constraints[]", "point");
            if (mc.vertex.empty() && !c.contains("point")) {
                fail_validation("config: each constraint needs 'vertex' or 'point'");
            }
            mc.radius = get_or(c, "solver.constraints[]", "radius", mc.radius);
            mc.theta_q = get_or(c, "solver.constraints[]", "theta_q", mc.theta_q);
            o.constraints.push_back(mc);
        }
    }
}

TilingSpec parse_tiling(const json& j) {
    only_keys(j, "tiling", {"mode", "copies", "dirichlet_axis", "theta"});
    TilingSpec t;
    t.mode = tiling_mode_from_string(get<std::string>(j, "tiling", "mode"));
    if (j.contains("copies")) {
        const auto c = get<std::vector<int>>(j, "tiling", "copies");
        if (c.size() != 2) fail_validation("config: 'tiling.copies' must have two entries");
        t.copies = {c[0], c[1]};
    }
    t.dirichlet_axis = get_or(j, "tiling", "dirichlet_axis", 0);
    if (j.contains("theta")) {
        const Vec2 th = get_vec(j, "tiling", "theta");
        t.theta1 = th.x;
        t.theta2 = th.y;
    }
    t.validate();
    return t;
}

std::string locate(const std::string& text, std::size_t byte) {
    const std::size_t upto = std::min(byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    std::ostringstream os;
    os << "line " << line;
    return os.str();
}

}  // namespace

GridPtr RunConfig::grid_for(const DomainSpec& d) const {
    if (dims) return build_grid_dims(d, *dims);
    return build_grid(d, *resolution);
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail_validation("config: JSON syntax error at " + locate(text, e.byte) + ": " + e.what());
    }
    only_keys(j, "<root>", {"domain", "bc", "grid", "s", "q", "seed", "solver", "sweep", "tiling", "diagnostics",
                            "stverify", "output"});
    RunConfig c;
    c.base_dir = base_dir;
    c.domain = parse_domain(get<json>(j, "<root>", "domain"));
    c.bc = parse_bc(get<json>(j, "<root>", "bc"));
    const json grid = get<json>(j, "<root>", "grid");
    only_keys(grid, "grid", {"resolution", "dims"});
    if (grid.contains("dims")) {
        const auto d = get<std::vector<int>>(grid, "grid", "dims");
        if (d.size() != 2) fail_validation("config: 'grid.dims' must have two entries");
        c.dims = std::array<int, 2>{d[0], d[1]};
    } else {
        c.resolution = get<double>(grid, "grid", "resolution");
    }
    c.solve.s = get<double>(j, "<root>", "s");
    c.solve.q = get<double>(j, "<root>", "q");
    if (j.contains("seed")) {
        c.solve.seed = get<std::uint64_t>(j, "<root>", "seed");
        c.have_seed = true;
    }
    if (j.contains("solver")) parse_solver(j.at("solver"), c.solve, base_dir);
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        only_keys(s, "sweep", {"R_list", "warm_start"});
        c.R_list = get<std::vector<double>>(s, "sweep", "R_list");
        c.warm_start = get_or(s, "sweep", "warm_start", false);
    }
    if (j.contains("tiling")) c.tiling = parse_tiling(j.at("tiling"));
    if (j.contains("diagnostics")) {
        only_keys(j.at("diagnostics"), "diagnostics", {"eps"});
        c.eps = get_or(j.at("diagnostics"), "diagnostics", "eps", c.eps);
    }
    if (j.contains("stverify")) {
        const json& s = j.at("stverify");
        only_keys(s, "stverify", {"nodes", "reach", "fields", "r_list"});
        c.stverify.nodes = get_or(s, "stverify", "nodes", c.stverify.nodes);
        c.stverify.reach = get_or(s, "stverify", "reach", c.stverify.reach);
        c.stverify.fields = get_or(s, "stverify", "fields", c.stverify.fields);
        c.stverify.r_list = get_or(s, "stverify", "r_list", c.stverify.r_list);
    }
    if (j.contains("output")) {
        only_keys(j.at("output"), "output", {"name"});
        c.name = get_or<std::string>(j.at("output"), "output", "name", c.name);
    }
    EnergyParams probe;
    probe.s = c.solve.s;
    probe.q = c.solve.q;
    probe.symbol.grid = std::make_shared<Grid>();
    probe.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

}  // namespace fracsol
