#include "fracsol/commands.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fracsol/config.hpp"
#include "fracsol/diagnostics.hpp"
#include "fracsol/io.hpp"
#include "fracsol/solver.hpp"
#include "fracsol/stx.hpp"
#include "fracsol/tiling.hpp"

namespace fracsol {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path prepare_out(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

RunConfig load(const CommandOptions& opt) {
    if (opt.config.empty()) fail_validation("--config is required");
    RunConfig c = load_config(opt.config);
    if (opt.seed) {
        c.solve.seed = *opt.seed;
        c.have_seed = true;
    }
    if (!c.have_seed) fail_validation("config: 'seed' is mandatory (or pass --seed)");
    if (opt.eps) c.eps = *opt.eps;
    return c;
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json report_json(const ConcentrationReport& r) {
    json j;
    j["x_star"] = vec_json(r.x_star);
    j["node"] = r.node;
    j["rho_eps"] = r.rho_eps;
    j["rho_bubble"] = r.rho_bubble;
    j["weight"] = r.weight;
    j["multi_bubble"] = r.multi_bubble;
    j["diffuse"] = r.diffuse;
    j["epsilon"] = r.epsilon;
    j["cell_diameter"] = r.cell_diameter;
    j["radii"] = r.radii;
    j["mass_profile"] = r.mass_profile;
    j["location_class"] = r.location.location_class;
    json vd = json::object();
    for (const auto& [name, d] : r.location.vertex_distances) vd[name] = d;
    j["vertex_distances"] = vd;
    json ed = json::object();
    for (const auto& [name, d] : r.location.edge_distances) ed[name] = d;
    j["edge_distances"] = ed;
    return j;
}

json solution_json(const Solution& sol) {
    json j;
    j["lambda"] = sol.lambda;
    j["residual_l2"] = sol.residual.l2;
    j["residual_hms"] = sol.residual.hms;
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    j["constraint_active"] = sol.constraint_active;
    j["constraint_fraction"] = sol.constraint_fraction;
    return j;
}

json provenance(const std::string& command, const RunConfig& c) {
    json p;
    p["command"] = command;
    p["seed"] = c.solve.seed;
    p["config"] = c.name;
    return p;
}

FieldMeta meta_for(const Solution& sol, const RunConfig& c, const std::string& command) {
    FieldMeta m;
    m.bc = sol.bc;
    m.s = c.solve.s;
    m.q = c.solve.q;
    m.lambda = sol.lambda;
    m.residual = sol.residual.l2;
    m.provenance = provenance(command, c);
    return m;
}

json base_report(const std::string& command) {
    json j;
    j["report_version"] = kReportVersion;
    j["command"] = command;
    return j;
}

std::string stem_of(const fs::path& p) { return p.stem().string(); }

FieldFile read_input(const CommandOptions& opt) {
    if (opt.field.empty()) fail_validation("--field is required");
    return read_field_file(opt.field);
}

TilingSpec default_tiling(const BoundaryCondition& bc) {
    TilingSpec t;
    switch (bc.regime) {
        case Regime::neumann: t.mode = TilingMode::even; break;
        case Regime::dirichlet: t.mode = TilingMode::odd; break;
        case Regime::mixed_dn:
            t.mode = TilingMode::mixed;
            t.dirichlet_axis = bc.dirichlet_axis;
            break;
        case Regime::periodic:
        case Regime::quasi_periodic:
            t.mode = TilingMode::quasi_phase;
            t.theta1 = bc.theta1;
            t.theta2 = bc.theta2;
            break;
    }
    return t;
}

json structure_json(const std::vector<StructurePoint>& pts) {
    json a = json::array();
    for (const auto& p : pts) {
        a.push_back({{"position", vec_json(p.position)}, {"density", p.density}, {"sign", p.sign},
                     {"phase", p.phase}});
    }
    return a;
}

bool wraps(const Field& u, const BoundaryCondition& bc) {
    return u.grid().torus || bc.regime == Regime::periodic || bc.regime == Regime::quasi_periodic;
}

double max_rel_diff(const Field& a, const Field& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        num = std::max(num, std::abs(a.at(n) - b.at(n)));
        den = std::max(den, b.abs_at(n));
    }
    return den > 0.0 ? num / den : num;
}

}  // namespace

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::validation: return 2;
        case ErrorKind::convergence: return 3;
        case ErrorKind::io: return 4;
    }
    return 1;
}

int cmd_solve(const CommandOptions& opt) {
    const RunConfig c = load(opt);
    const fs::path out = prepare_out(opt.out);
    const GridPtr grid = c.grid_for(c.domain);
    const SolveConfig sc = make_config(grid, c.bc, c.solve);
    const Solution sol = c.solve.constraints.empty() ? minimize(sc) : minimize_constrained(sc);
    const ConcentrationReport rep = solution_report(sol, c.solve.q, c.eps);

    write_field_file(out / (c.name + ".fld"), sol.field, meta_for(sol, c, "solve"));
    json j = base_report("solve");
    j["dims"] = {grid->dims[0], grid->dims[1]};
    j["solution"] = solution_json(sol);
    j["concentration"] = report_json(rep);
    j["constant_quotient"] = std::pow(grid->area(), 1.0 - 2.0 / c.solve.q);
    write_json(out / (c.name + ".json"), j);
    return sol.converged ? 0 : 3;
}

int cmd_sweep(const CommandOptions& opt) {
    const RunConfig c = load(opt);
    if (c.R_list.empty()) fail_validation("config: 'sweep.R_list' must not be empty");
    const fs::path out = prepare_out(opt.out);
    SweepConfig sw;
    sw.family = c.domain;
    sw.bc = c.bc;
    if (c.resolution) sw.resolution = *c.resolution;
    sw.dims = c.dims;
    sw.options = c.solve;
    sw.warm_start = c.warm_start;
    sw.threads = opt.threads;
    sw.eps = c.eps;
    const auto entries = sweep_R(sw, c.R_list);

    json j = base_report("sweep");
    json rows = json::array();
    std::vector<ConcentrationReport> reports;
    std::vector<double> Rs;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const SweepEntry& e = entries[k];
        json row;
        row["R"] = e.R;
        row["ok"] = e.ok;
        row["error"] = e.error;
        if (e.solution.field.size() > 0) {
            row["lambda"] = e.solution.lambda;
            row["residual_l2"] = e.solution.residual.l2;
            row["iterations"] = e.solution.iterations;
            row["weight"] = e.report.weight;
            row["location_class"] = e.report.location.location_class;
            row["x_star"] = vec_json(e.report.x_star);
            const std::string file = c.name + "_R" + std::to_string(k) + ".fld";
            write_field_file(out / file, e.solution.field, meta_for(e.solution, c, "sweep"));
            row["field"] = file;
            reports.push_back(e.report);
            Rs.push_back(e.R);
        }
        rows.push_back(row);
    }
    j["entries"] = rows;
    if (reports.size() >= 3) {
        const DichotomyVerdict v = classify_dichotomy(reports, Rs);
        j["dichotomy"] = {{"verdict", v.verdict}, {"R", v.R}, {"evidence", v.evidence}, {"slope", v.slope}};
    }
    write_json(out / (c.name + "_sweep.json"), j);
    return 0;
}

int cmd_extend(const CommandOptions& opt) {
    const FieldFile in = read_input(opt);
    TilingSpec spec = default_tiling(in.meta.bc);
    if (!opt.config.empty()) {
        const RunConfig c = load_config(opt.config);
        if (c.tiling) spec = *c.tiling;
    }
    if (opt.mode) {
        const TilingSpec fallback = default_tiling(in.meta.bc);
        spec.mode = tiling_mode_from_string(*opt.mode);
        if (spec.mode == TilingMode::quasi_phase) {
            spec.theta1 = fallback.theta1;
            spec.theta2 = fallback.theta2;
        }
        if (spec.mode == TilingMode::mixed) spec.dirichlet_axis = fallback.dirichlet_axis;
    }
    if (opt.copies) spec.copies = *opt.copies;
    spec.validate();
    const fs::path out = prepare_out(opt.out);

    const Extended ext = extend(in.field, in.meta.bc, spec);
    const ExtensionCheck chk = verify_extension(ext, in.meta.s, in.meta.q, in.meta.residual);
    const auto pts = structure_map(ext.field, in.meta.q, true);

    FieldMeta m = in.meta;
    m.bc = ext.bc;
    m.residual = chk.residual.l2;
    m.provenance["extended_from"] = opt.field.filename().string();
    m.provenance["tiling"] = {{"mode", to_string(spec.mode)}, {"copies", {spec.copies[0], spec.copies[1]}}};
    const std::string stem = stem_of(opt.field) + "_ext";
    write_field_file(out / (stem + ".fld"), ext.field, m);

    json j = base_report("extend");
    j["mode"] = to_string(spec.mode);
    j["copies"] = {spec.copies[0], spec.copies[1]};
    j["residual_l2"] = chk.residual.l2;
    j["residual_hms"] = chk.residual.hms;
    j["fundamental_residual"] = chk.fundamental_residual;
    j["accepted"] = chk.accepted;
    j["structure"] = structure_json(pts);
    write_json(out / (stem + ".json"), j);
    return 0;
}

int cmd_render(const CommandOptions& opt) {
    const FieldFile in = read_input(opt);
    const fs::path out = prepare_out(opt.out);
    const std::string stem = stem_of(opt.field);
    write_bytes(out / (stem + (in.field.is_complex() ? ".ppm" : ".pgm")), render_image(in.field));
    if (opt.overlay) {
        const auto pts = structure_map(in.field, in.meta.q, wraps(in.field, in.meta.bc));
        write_bytes(out / (stem + "_overlay.ppm"), render_overlay(in.field, pts));
    }
    return 0;
}

int cmd_diagnose(const CommandOptions& opt) {
    const FieldFile in = read_input(opt);
    const fs::path out = prepare_out(opt.out);
    Solution sol;
    sol.field = in.field;
    sol.bc = in.meta.bc;
    const double eps = opt.eps.value_or(0.01);
    const ConcentrationReport rep = solution_report(sol, in.meta.q, eps);
    json j = base_report("diagnose");
    j["concentration"] = report_json(rep);
    j["lambda"] = in.meta.lambda;
    j["residual"] = in.meta.residual;
    json prof = json::array();
    for (const auto& [r, v] : decay_profile(in.field, rep.x_star, wraps(in.field, in.meta.bc))) {
        prof.push_back({r, v});
    }
    j["decay_profile"] = prof;
    write_json(out / (stem_of(opt.field) + "_diagnose.json"), j);
    return 0;
}

int cmd_stverify(const CommandOptions& opt) {
    const RunConfig c = load(opt);
    if (c.bc.regime != Regime::neumann && c.bc.regime != Regime::dirichlet) {
        fail_validation("stverify supports only the neumann and dirichlet regimes");
    }
    if (c.domain.is_triangle()) fail_validation("stverify needs a rectangle or strip domain");
    const fs::path out = prepare_out(opt.out);
    const double s = c.solve.s;
    const GridPtr grid = c.grid_for(c.domain);
    const SpectralSymbol sym = symbol(grid, c.bc);
    const TGrid tg = default_tgrid(sym, c.stverify.nodes, c.stverify.reach);
    const auto table = make_profile_table(sym, s, tg);

    std::mt19937_64 rng(c.solve.seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    json fields = json::array();
    double worst_gap = 0.0;
    double worst_trace = 0.0;
    for (int f = 0; f < c.stverify.fields; ++f) {
        Field u(grid, false);
        for (auto& x : u.re()) x = 2.0 * uniform() - 1.0;
        const STExtension w = st_extend(u, table);
        const EnergyIdentity id = st_energy(w);
        const double mism = max_rel_diff(neumann_trace(w), apply_fraclap(u, sym, s));
        worst_gap = std::max(worst_gap, id.gap);
        worst_trace = std::max(worst_trace, mism);
        fields.push_back({{"cs_energy", id.cs_energy}, {"seminorm", id.seminorm}, {"gap", id.gap},
                          {"trace_mismatch", mism}});
    }

    // bump at the cell center, omega the disk of radius diameter/8 around it
    const Vec2 center = grid->position(grid->dims[0] / 2, grid->dims[1] / 2);
    const double diam = norm(grid->lattice0() + grid->lattice1());
    Field bump(grid, false);
    std::vector<char> omega(grid->size(), 0);
    for (int i = 0; i < grid->dims[0]; ++i) {
        for (int j = 0; j < grid->dims[1]; ++j) {
            const double d = norm(grid->position(i, j) - center);
            const std::size_t n = grid->index(i, j);
            bump.re()[n] = std::exp(-std::pow(d / (diam / 32.0), 2));
            omega[n] = d <= diam / 8.0 ? 1 : 0;
        }
    }
    std::vector<double> r_list = c.stverify.r_list;
    if (r_list.empty()) {
        const double r0 = std::max(diam / 16.0, 2.0 * grid->spacing());
        for (int k = 0; k <= 4; ++k) r_list.push_back(r0 * std::pow(2.0, k));
    }
    json cut = json::array();
    for (double r : r_list) {
        cut.push_back({{"r", r}, {"defect", cutoff_energy_defect(bump, sym, s, omega, r, tg)}});
    }

    json j = base_report("stverify");
    j["s"] = s;
    j["c_s"] = c_s(s);
    j["t_grid"] = {{"first", tg.first()}, {"last", tg.last()}, {"count", tg.size()}};
    j["fields"] = fields;
    j["max_gap"] = worst_gap;
    j["max_trace_mismatch"] = worst_trace;
    j["cutoff_defect"] = cut;
    write_json(out / (c.name + "_stverify.json"), j);
    return 0;
}

}  // namespace fracsol
