#include "fracsol/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "fracsol/error.hpp"

namespace fracsol {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

Vec2 find_vertex(const DomainSpec& domain, const std::string& name) {
    for (const auto& v : vertices(domain)) {
        if (v.name == name) return v.p;
    }
    fail_validation("unknown vertex '" + name + "' for domain " + to_string(domain.kind));
}

double pairwise_distance(const Grid& g, Vec2 a, Vec2 b) {
    return g.torus ? norm(g.min_image(a - b)) : norm(a - b);
}

std::size_t nearest_node(const Grid& g, Vec2 p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) {
            const double d = pairwise_distance(g, g.position(i, j), p);
            if (d < best_d) {
                best_d = d;
                best = g.index(i, j);
            }
        }
    }
    return best;
}

Vec2 node_position(const Grid& g, std::size_t n) {
    const int i = static_cast<int>(n / static_cast<std::size_t>(g.dims[1]));
    const int j = static_cast<int>(n % static_cast<std::size_t>(g.dims[1]));
    return g.position(i, j);
}

Field group_average(const Field& u, const SymmetryGroup& group) {
    Field out(u.grid_ptr(), u.is_complex());
    auto ore = out.re();
    auto oim = out.im();
    const auto ure = u.re();
    const auto uim = u.im();
    for (const auto& g : group.elements) {
        const double cr = g.character.real();
        const double ci = g.character.imag();
        for (std::size_t n = 0; n < u.size(); ++n) {
            const auto m = static_cast<std::size_t>(g.perm[n]);
            if (u.is_complex()) {
                ore[m] += cr * ure[n] - ci * uim[n];
                oim[m] += cr * uim[n] + ci * ure[n];
            } else {
                ore[m] += cr * ure[n];
            }
        }
    }
    out *= 1.0 / static_cast<double>(group.order());
    return out;
}

bool has_sign_characters(const SymmetryGroup& group) {
    for (const auto& g : group.elements) {
        if (std::abs(g.character - 1.0) > 1e-12) return true;
    }
    return false;
}

// Per-node data for one constraint: distance to the nearest orbit image of the center.
struct ConstraintGeometry {
    std::vector<double> dist;
    double radius = 0.0;
    double ramp = 0.0;
    double theta = 0.0;
};

ConstraintGeometry constraint_geometry(const MassConstraint& c, const SolveConfig& cfg) {
    const Grid& g = *cfg.params.symbol.grid;
    const DomainSpec& dom = g.domain;
    ConstraintGeometry geo;
    const double big_r = dom.scale * (dom.kind == DomainKind::parallelogram ? norm(dom.h1) : dom.a);
    geo.radius = c.radius > 0.0 ? c.radius : 0.25 * big_r;
    geo.ramp = 0.5 * geo.radius;
    geo.theta = c.theta_q > 0.0 ? c.theta_q : default_theta(cfg.params.q);
    const Vec2 center = c.vertex.empty() ? c.point : find_vertex(dom, c.vertex);
    std::vector<Vec2> orbit{center};
    if (cfg.symmetrize) {
        const std::size_t n0 = nearest_node(g, center);
        for (const auto& e : cfg.symmetrize->elements) {
            const Vec2 p = node_position(g, static_cast<std::size_t>(e.perm[n0]));
            bool seen = false;
            for (const auto& o : orbit) seen = seen || pairwise_distance(g, o, p) < 1e-9 * big_r;
            if (!seen) orbit.push_back(p);
        }
    }
    geo.dist.resize(g.size());
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& o : orbit) d = std::min(d, pairwise_distance(g, g.position(i, j), o));
            geo.dist[g.index(i, j)] = d;
        }
    }
    return geo;
}

double ball_fraction(const Field& u, const ConstraintGeometry& geo, double q) {
    double in = 0.0;
    double total = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double m = std::pow(u.abs_at(n), q);
        total += m;
        if (geo.dist[n] <= geo.radius) in += m;
    }
    return total > 0.0 ? in / total : 0.0;
}

// Scales u by c inside the ball, blending back to 1 across the ramp.
void apply_ball_multiplier(Field& u, const ConstraintGeometry& geo, double c) {
    auto re = u.re();
    auto im = u.im();
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double d = geo.dist[n];
        if (d >= geo.radius + geo.ramp) continue;
        const double f = c + (1.0 - c) * smoothstep((d - geo.radius) / geo.ramp);
        re[n] *= f;
        if (!im.empty()) im[n] *= f;
    }
}

void enforce_constraint(Field& u, const ConstraintGeometry& geo, double q) {
    const double frac = ball_fraction(u, geo, q);
    if (frac <= geo.theta) return;
    if (lq_power(u, q) < 1e-300) fail_validation("constraint infeasible: field mass below numerical floor");
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        Field trial = u;
        apply_ball_multiplier(trial, geo, mid);
        if (ball_fraction(trial, geo, q) > geo.theta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    apply_ball_multiplier(u, geo, lo);
    if (is_zero(u)) fail_validation("constraint infeasible: field vanished");
}

Field radial_average(const Field& u) {
    const Grid& g = u.grid();
    const Vec2 center = g.origin + 0.5 * g.lattice0() + 0.5 * g.lattice1();
    const double h = std::min(norm(g.step0), norm(g.step1));
    std::vector<int> bin(u.size());
    int nb = 0;
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) {
            const Vec2 d = g.position(i, j) - center;
            const int b = static_cast<int>(std::floor(norm(g.torus ? g.min_image(d) : d) / h));
            bin[g.index(i, j)] = b;
            nb = std::max(nb, b + 1);
        }
    }
    std::vector<double> sr(static_cast<std::size_t>(nb), 0.0), si(sr), cnt(sr);
    for (std::size_t n = 0; n < u.size(); ++n) {
        const auto b = static_cast<std::size_t>(bin[n]);
        sr[b] += u.re()[n];
        if (u.is_complex()) si[b] += u.im()[n];
        cnt[b] += 1.0;
    }
    Field out = u;
    for (std::size_t n = 0; n < u.size(); ++n) {
        const auto b = static_cast<std::size_t>(bin[n]);
        out.re()[n] = sr[b] / cnt[b];
        if (u.is_complex()) out.im()[n] = si[b] / cnt[b];
    }
    return out;
}

Field initial_field(const SolveConfig& cfg) {
    const GridPtr& grid = cfg.params.symbol.grid;
    const Grid& g = *grid;
    const bool complex = !cfg.params.symbol.bc.preserves_real();
    switch (cfg.init.kind) {
        case InitKind::constant_plus_noise: {
            std::mt19937_64 rng(cfg.seed);
            Field u(grid, complex);
            for (std::size_t n = 0; n < u.size(); ++n) {
                u.re()[n] = 1.0 + cfg.init.amplitude * (2.0 * uniform01(rng) - 1.0);
            }
            if (complex) {
                for (std::size_t n = 0; n < u.size(); ++n) {
                    u.im()[n] = cfg.init.amplitude * (2.0 * uniform01(rng) - 1.0);
                }
            }
            return u;
        }
        case InitKind::corner_bump: {
            const Vec2 p = cfg.init.vertex.empty() ? cfg.init.point : find_vertex(g.domain, cfg.init.vertex);
            const double w = cfg.init.width;
            Field u(grid, complex);
            for (int i = 0; i < g.dims[0]; ++i) {
                for (int j = 0; j < g.dims[1]; ++j) {
                    const double d = pairwise_distance(g, g.position(i, j), p);
                    u.re()[g.index(i, j)] = std::exp(-(d * d) / (w * w)) + 1e-3;
                }
            }
            return u;
        }
        case InitKind::multi_start:
            fail_validation("multi_start is resolved before a single run");
        case InitKind::file: {
            if (!cfg.init.field) fail_validation("file init requires a field");
            const Field& f = *cfg.init.field;
            Field u = f.grid().same_shape(g) ? Field(grid, std::vector<double>(f.re().begin(), f.re().end()),
                                                     std::vector<double>(f.im().begin(), f.im().end()))
                                             : rescale_field(f, grid);
            if (complex) u.promote_to_complex();
            return u;
        }
    }
    return Field(grid, complex);
}

class Projector {
public:
    explicit Projector(const SolveConfig& cfg) : cfg_(cfg) {
        for (const auto& c : cfg.constraints) geo_.push_back(constraint_geometry(c, cfg));
        positivity_ = cfg.enforce_positivity && !(cfg.symmetrize && has_sign_characters(*cfg.symmetrize));
    }

    Field operator()(Field u) const {
        const double q = cfg_.params.q;
        if (positivity_) u = u.is_complex() ? u : modulus(u);
        if (cfg_.symmetrize) u = group_average(u, *cfg_.symmetrize);
        if (cfg_.radialize) u = radial_average(u);
        for (int pass = 0; pass < (geo_.size() > 1 ? 4 : 1); ++pass) {
            for (const auto& geo : geo_) enforce_constraint(u, geo, q);
        }
        const double n = lq_norm(u, q);
        if (!(n > 0.0) || !std::isfinite(n)) return u;
        u *= 1.0 / n;
        return u;
    }

    const std::vector<ConstraintGeometry>& geometry() const { return geo_; }

private:
    const SolveConfig& cfg_;
    std::vector<ConstraintGeometry> geo_;
    bool positivity_ = true;
};

Solution run(const SolveConfig& cfg) {
    cfg.validate();
    const Energy energy(cfg.params);
    const FractionalOperator& op = energy.op();
    const Projector project(cfg);
    const bool restricted = cfg.radialize || !cfg.constraints.empty();

    Field u = project(initial_field(cfg));
    if (is_zero(u)) throw Error(ErrorKind::convergence, "initial field vanished after projection");
    auto [j, g] = energy.quotient_and_gradient(u);
    Field d = op.apply_resolvent(g);
    double tau = 0.5;

    Solution sol;
    sol.bc = cfg.params.symbol.bc;
    sol.history.push_back(j);
    int calm = 0;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        bool accepted = false;
        Field u_new;
        double j_new = 0.0;
        Field g_new;
        for (int bt = 0; bt < 60; ++bt) {
            Field trial = u;
            trial.axpy(-tau, d);
            trial = project(std::move(trial));
            const double n = lq_norm(trial, cfg.params.q);
            if (!std::isfinite(n) || !(n > 0.0)) {
                tau *= 0.5;
                continue;
            }
            auto [jt, gt] = energy.quotient_and_gradient(trial);
            if (!std::isfinite(jt)) {
                tau *= 0.5;
                continue;
            }
            const double dec = inner(g, u - trial);
            const double slack = 1e-14 * std::max(1.0, j);
            if (jt <= j - 1e-4 * std::max(dec, 0.0) + slack) {
                u_new = std::move(trial);
                j_new = jt;
                g_new = std::move(gt);
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) break;

        Field d_new = op.apply_resolvent(g_new);
        const Field sv = u_new - u;
        const Field yv = g_new - g;
        const double sy = inner(sv, yv);
        const double ypy = inner(yv, d_new - d);
        tau = (sy > 0.0 && ypy > 0.0) ? std::clamp(sy / ypy, 1e-8, 100.0) : std::min(2.0 * tau, 100.0);

        const double rel = (j - j_new) / std::max(std::abs(j), 1e-300);
        u = std::move(u_new);
        g = std::move(g_new);
        d = std::move(d_new);
        j = j_new;
        sol.history.push_back(j);

        const double res = l2_norm(g) / (2.0 * std::sqrt(j));
        if (rel < cfg.tol_J && res < cfg.tol_residual) {
            sol.converged = true;
            ++it;
            break;
        }
        if (restricted) {
            calm = rel < cfg.tol_J ? calm + 1 : 0;
            if (calm >= 5) {
                sol.converged = true;
                ++it;
                break;
            }
        }
    }
    sol.iterations = it;
    sol.field = energy.nehari_normalize(u);
    sol.lambda = energy.quotient(sol.field);
    sol.residual = energy.residual(sol.field);
    if (!sol.converged && !restricted) sol.converged = sol.residual.l2 < cfg.tol_residual;
    for (const auto& geo : project.geometry()) {
        const double f = ball_fraction(sol.field, geo, cfg.params.q);
        sol.constraint_fraction.push_back(f);
        sol.constraint_active.push_back(f >= geo.theta * (1.0 - 1e-9));
    }
    return sol;
}

}  // namespace

std::string to_string(InitKind kind) {
    switch (kind) {
        case InitKind::constant_plus_noise: return "constant_plus_noise";
        case InitKind::corner_bump: return "corner_bump";
        case InitKind::file: return "file";
        case InitKind::multi_start: return "multi_start";
    }
    return "unknown";
}

InitKind init_kind_from_string(const std::string& name) {
    for (auto k : {InitKind::constant_plus_noise, InitKind::corner_bump, InitKind::file, InitKind::multi_start}) {
        if (to_string(k) == name) return k;
    }
    fail_validation("unknown init kind '" + name + "'");
}

void SolveConfig::validate() const {
    params.validate();
    if (max_iters < 1) fail_validation("max_iters must be >= 1");
    if (!(tol_J > 0.0) || !(tol_residual > 0.0)) fail_validation("tolerances must be positive");
    if (symmetrize && symmetrize->elements.front().perm.size() != params.symbol.grid->size()) {
        fail_validation("symmetry group does not match the grid");
    }
    for (const auto& c : constraints) {
        if (c.theta_q > 0.0 && c.theta_q >= 1.0) fail_validation("theta_q must lie in (0, 1)");
    }
}

double default_theta(double q) {
    if (!(q > 2.0)) fail_validation("default theta needs q > 2");
    auto f = [q](double t) { return std::pow(t / (1.0 - t), 1.0 - 2.0 / q) * std::pow(2.0, 2.0 / q) - 0.5; };
    double lo = 0.0;
    double hi = 0.5;
    while (f(hi) < 0.0) hi = 0.5 * (hi + 1.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return lo;
}

Solution minimize(const SolveConfig& cfg) {
    if (cfg.init.kind != InitKind::multi_start) return run(cfg);
    // a bump at every vertex, then the noise start; a later start must win by a relative 1e-9
    SolveConfig one = cfg;
    std::optional<Solution> best;
    auto consider = [&best](Solution sol) {
        if (!best || sol.lambda < best->lambda * (1.0 - 1e-9)) best = std::move(sol);
    };
    for (const auto& v : vertices(cfg.params.symbol.grid->domain)) {
        one.init.kind = InitKind::corner_bump;
        one.init.vertex = v.name;
        consider(run(one));
    }
    one.init.kind = InitKind::constant_plus_noise;
    consider(run(one));
    return std::move(*best);
}

Solution minimize(GridPtr grid, const BoundaryCondition& bc, SolveConfig cfg) {
    cfg.params.symbol = symbol(std::move(grid), bc);
    return minimize(cfg);
}

Solution minimize_constrained(const SolveConfig& cfg) {
    const DomainSpec& dom = cfg.params.symbol.grid->domain;
    for (const auto& c : cfg.constraints) {
        if (!c.vertex.empty()) {
            if (!dom.is_triangle()) fail_validation("vertex constraints require a triangle domain");
            find_vertex(dom, c.vertex);
        }
    }
    return minimize(cfg);
}

SolveConfig make_config(GridPtr grid, const BoundaryCondition& bc, const SolveOptions& opt) {
    SolveConfig cfg;
    cfg.params.s = opt.s;
    cfg.params.q = opt.q;
    cfg.params.symbol = symbol(grid, bc);
    cfg.max_iters = opt.max_iters;
    cfg.tol_J = opt.tol_J;
    cfg.tol_residual = opt.tol_residual;
    cfg.init = opt.init;
    cfg.seed = opt.seed;
    cfg.enforce_positivity = opt.enforce_positivity && bc.preserves_real();
    cfg.radialize = opt.radialize;
    cfg.constraints = opt.constraints;
    const bool triangle = grid->domain.is_triangle();
    std::string mode = opt.symmetrize;
    if (mode == "auto") {
        mode = triangle ? (bc.regime == Regime::dirichlet ? "odd" : "even") : "none";
    }
    if (mode == "even" || mode == "odd") {
        if (!bc.preserves_real()) fail_validation("group averaging needs real-preserving phases (0 or pi)");
        cfg.symmetrize = symmetry_group(*grid, mode == "odd" ? Character::odd : Character::even, opt.symmetry_axes);
    } else if (mode != "none") {
        fail_validation("symmetrize must be none, even, odd or auto");
    }
    return cfg;
}

Field rescale_field(const Field& u, const GridPtr& target) {
    const Grid& src = u.grid();
    const Grid& dst = *target;
    const bool wrap = src.torus;
    Field out(target, u.is_complex());
    auto sample = [&](std::span<const double> v, double x0, double x1) {
        const int n0 = src.dims[0];
        const int n1 = src.dims[1];
        auto fix = [wrap](double x, int n, int& a, int& b, double& t) {
            if (wrap) {
                const double f = std::floor(x);
                t = x - f;
                a = ((static_cast<int>(f) % n) + n) % n;
                b = (a + 1) % n;
            } else {
                x = std::clamp(x, 0.0, static_cast<double>(n - 1));
                a = std::min(static_cast<int>(std::floor(x)), n - 2);
                t = x - a;
                b = a + 1;
            }
        };
        int a0, b0, a1, b1;
        double t0, t1;
        fix(x0, n0, a0, b0, t0);
        fix(x1, n1, a1, b1, t1);
        return (1 - t0) * (1 - t1) * v[src.index(a0, a1)] + t0 * (1 - t1) * v[src.index(b0, a1)] +
               (1 - t0) * t1 * v[src.index(a0, b1)] + t0 * t1 * v[src.index(b0, b1)];
    };
    for (int i = 0; i < dst.dims[0]; ++i) {
        for (int j = 0; j < dst.dims[1]; ++j) {
            const double x0 = (i + dst.offset) / dst.dims[0] * src.dims[0] - src.offset;
            const double x1 = (j + dst.offset) / dst.dims[1] * src.dims[1] - src.offset;
            out.re()[dst.index(i, j)] = sample(u.re(), x0, x1);
            if (u.is_complex()) out.im()[dst.index(i, j)] = sample(u.im(), x0, x1);
        }
    }
    return out;
}

ConcentrationReport solution_report(const Solution& sol, double q, double eps) {
    const Grid& grid = sol.field.grid();
    const DomainSpec& dom = grid.domain;
    ReportOptions ro;
    ro.eps = eps;
    ro.periodic = grid.torus || sol.bc.regime == Regime::periodic || sol.bc.regime == Regime::quasi_periodic;
    std::vector<char> mask;
    if (dom.is_triangle()) {
        mask = fundamental_mask(grid);
        ro.mask = &mask;
    }
    ConcentrationReport r = concentration_report(sol.field, q, ro);
    if (dom.kind != DomainKind::parallelogram) vertex_distance(r, dom);
    return r;
}

std::vector<SweepEntry> sweep_R(const SweepConfig& cfg, const std::vector<double>& R_list) {
    if (R_list.empty()) fail_validation("R_list must not be empty");
    for (std::size_t k = 1; k < R_list.size(); ++k) {
        if (!(R_list[k] > R_list[k - 1])) fail_validation("R_list must be strictly increasing");
    }
    std::vector<SweepEntry> out(R_list.size());

    auto solve_one = [&](std::size_t k, const Field* warm) {
        SweepEntry& e = out[k];
        e.R = R_list[k];
        try {
            DomainSpec dom = cfg.family;
            dom.scale = R_list[k];
            const GridPtr grid = cfg.dims ? build_grid_dims(dom, *cfg.dims) : build_grid(dom, cfg.resolution);
            SolveOptions opt = cfg.options;
            if (warm) {
                opt.init.kind = InitKind::file;
                opt.init.field = rescale_field(*warm, grid);
            }
            SolveConfig sc = make_config(grid, cfg.bc, opt);
            Solution sol;
            bool ok = false;
            try {
                sol = minimize_constrained(sc);
                ok = sol.converged;
            } catch (const Error&) {
                if (!warm) throw;
            }
            if (!ok && warm) {
                opt.init = InitSpec{};
                opt.init.kind = InitKind::corner_bump;
                opt.init.vertex = vertices(dom).front().name;
                sol = minimize_constrained(make_config(grid, cfg.bc, opt));
            }
            e.report = solution_report(sol, cfg.options.q, cfg.eps);
            e.ok = sol.converged;
            if (!sol.converged) e.error = "not converged";
            e.solution = std::move(sol);
        } catch (const std::exception& ex) {
            e.ok = false;
            e.error = ex.what();
        }
    };

    if (cfg.warm_start) {
        const Field* prev = nullptr;
        for (std::size_t k = 0; k < R_list.size(); ++k) {
            solve_one(k, prev);
            prev = out[k].ok ? &out[k].solution.field : prev;
        }
    } else {
        const int nthreads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(R_list.size())));
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t k = next++; k < R_list.size(); k = next++) solve_one(k, nullptr);
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    }
    return out;
}

Reallocation bubble_reallocation(const Field& a, const Field& b, const Field& c, const EnergyParams& p) {
    require_same_grid(a, b);
    require_same_grid(a, c);
    const double q = p.q;
    auto overlap = [](const Field& x, const Field& y) {
        const double nx = l2_norm(x);
        const double ny = l2_norm(y);
        if (nx == 0.0 || ny == 0.0) return 0.0;
        double acc = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) acc += x.abs_at(n) * y.abs_at(n);
        return acc * x.grid().weight / (nx * ny);
    };
    if (overlap(a, b) > 1e-12 || overlap(a, c) > 1e-12 || overlap(b, c) > 1e-12) {
        fail_validation("bubble supports overlap");
    }
    const double bq = lq_power(b, q);
    const double cq = lq_power(c, q);
    if (!(bq > 0.0) || !(cq > 0.0)) fail_validation("bubble_reallocation needs nonzero b and c");
    const FractionalOperator op(p.symbol, p.s);
    auto ratio = [&](const Field& x, double xq) { return (op.seminorm_sq(x) + lq_power(x, 2.0)) / xq; };
    Reallocation r;
    const Field* keep = &c;
    double keep_q = cq;
    if (ratio(b, bq) < ratio(c, cq)) {
        keep = &b;
        keep_q = bq;
        r.swapped = true;
    }
    const double k = std::pow(bq + cq, 1.0 / q) / std::pow(keep_q, 1.0 / q);
    r.field = a;
    r.field.axpy(k, *keep);
    return r;
}

double strip_tail_fraction(const Field& u, double q) {
    const Grid& g = u.grid();
    const int n1 = g.dims[1];
    const int band = std::max(1, n1 / 10);
    double tail = 0.0;
    double total = 0.0;
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < n1; ++j) {
            const double m = std::pow(u.abs_at(g.index(i, j)), q);
            total += m;
            if (j < band || j >= n1 - band) tail += m;
        }
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace fracsol
