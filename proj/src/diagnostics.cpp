#include "fracsol/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fracsol/error.hpp"
#include "fracsol/spectral.hpp"

namespace fracsol {

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    return norm(p - (a + t * ab));
}

// Smallest distance from any lattice image of p to the target measured by f.
template <class F>
double image_distance(const Grid& g, Vec2 p, bool wrap, F f) {
    if (!wrap) return f(p);
    double best = std::numeric_limits<double>::infinity();
    for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
            best = std::min(best, f(p + static_cast<double>(a) * g.lattice0() + static_cast<double>(b) * g.lattice1()));
        }
    }
    return best;
}

}  // namespace

double grid_distance(const Grid& grid, Vec2 a, Vec2 b, bool periodic) {
    const Vec2 d = a - b;
    return (grid.torus || periodic) ? norm(grid.min_image(d)) : norm(d);
}

double ConcentrationReport::mass_at(double rho) const {
    if (radii.empty()) return 0.0;
    if (rho >= radii.back()) return 1.0;
    if (rho <= radii.front()) return mass_profile.front() * std::max(rho, 0.0) / radii.front();
    const auto it = std::upper_bound(radii.begin(), radii.end(), rho);
    const std::size_t k = static_cast<std::size_t>(it - radii.begin());
    const double t = (rho - radii[k - 1]) / (radii[k] - radii[k - 1]);
    return mass_profile[k - 1] + t * (mass_profile[k] - mass_profile[k - 1]);
}

ConcentrationReport concentration_report(const Field& u, double q, const ReportOptions& opt) {
    if (is_zero(u)) fail_validation("concentration report of the zero field");
    if (!(opt.eps > 0.0) || !(opt.eps < 0.5)) fail_validation("eps must lie in (0, 1/2)");
    if (opt.radii < 2) fail_validation("need at least two radii");
    const Grid& g = u.grid();
    const bool wrap = g.torus || opt.periodic;
    if (opt.mask && opt.mask->size() != u.size()) fail_validation("mask does not match the grid");
    auto inside = [&](std::size_t n) { return !opt.mask || (*opt.mask)[n] != 0; };

    std::vector<double> dens(u.size(), 0.0);
    for (std::size_t n = 0; n < u.size(); ++n) {
        if (inside(n)) dens[n] = std::pow(u.abs_at(n), q);
    }
    const BoundaryCondition sbc = wrap ? BoundaryCondition::periodic() : BoundaryCondition::neumann();
    const SpectralSymbol sym = symbol(u.grid_ptr(), sbc);
    std::vector<double> heat(sym.mu.size());
    for (std::size_t k = 0; k < heat.size(); ++k) heat[k] = std::exp(-g.weight * sym.mu[k]);
    const Field smooth = apply_multiplier(Field(u.grid_ptr(), dens), sym, heat);

    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < u.size(); ++n) {
        if (inside(n)) peak = std::max(peak, smooth.re()[n]);
    }
    ConcentrationReport rep;
    rep.epsilon = opt.eps;
    rep.periodic = wrap;
    // ties within rounding resolve to the smallest index
    const double tie = peak - 1e-12 * std::abs(peak);
    for (std::size_t n = 0; n < u.size(); ++n) {
        if (inside(n) && smooth.re()[n] >= tie) {
            rep.node = n;
            break;
        }
    }
    const int i0 = static_cast<int>(rep.node / static_cast<std::size_t>(g.dims[1]));
    const int j0 = static_cast<int>(rep.node % static_cast<std::size_t>(g.dims[1]));
    rep.x_star = g.position(i0, j0);

    std::vector<std::pair<double, double>> dm;
    dm.reserve(u.size());
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) {
            const std::size_t n = g.index(i, j);
            if (dens[n] > 0.0) dm.emplace_back(grid_distance(g, g.position(i, j), rep.x_star, wrap), dens[n]);
        }
    }
    std::sort(dm.begin(), dm.end());
    std::vector<double> dist(dm.size()), cum(dm.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < dm.size(); ++k) {
        dist[k] = dm[k].first;
        acc += dm[k].second;
        cum[k] = acc;
    }
    const double total = acc;
    auto mass = [&](double rho) {
        const auto it = std::upper_bound(dist.begin(), dist.end(), rho);
        if (it == dist.begin()) return 0.0;
        return cum[static_cast<std::size_t>(it - dist.begin()) - 1] / total;
    };

    const Vec2 l0 = g.lattice0();
    const Vec2 l1 = g.lattice1();
    rep.cell_diameter = std::max(norm(l0 + l1), norm(l0 - l1));
    const double h = g.spacing();
    const double dmax = std::max(rep.cell_diameter, dist.empty() ? 0.0 : dist.back());
    rep.radii.resize(static_cast<std::size_t>(opt.radii));
    rep.mass_profile.resize(rep.radii.size());
    for (int k = 0; k < opt.radii; ++k) {
        const double r = h * std::pow(dmax / h, static_cast<double>(k) / (opt.radii - 1));
        rep.radii[static_cast<std::size_t>(k)] = r;
        rep.mass_profile[static_cast<std::size_t>(k)] = mass(r);
    }
    rep.radii.back() = dmax;
    rep.mass_profile.back() = 1.0;

    rep.rho_eps = rep.radii.back();
    for (std::size_t k = 0; k < rep.radii.size(); ++k) {
        if (rep.mass_profile[k] >= 1.0 - opt.eps) {
            rep.rho_eps = rep.radii[k];
            break;
        }
    }
    rep.rho_bubble = rep.rho_eps;
    for (std::size_t k = 0; k < rep.radii.size() && rep.radii[k] < rep.rho_eps; ++k) {
        const double m = rep.mass_profile[k];
        if (m >= 0.2 && mass(std::min(2.0 * rep.radii[k], dmax)) - m < 0.25 * opt.eps) {
            rep.rho_bubble = rep.radii[k];
            break;
        }
    }
    rep.weight = rep.mass_at(rep.rho_bubble);
    rep.multi_bubble = rep.weight < 1.0 - 2.0 * opt.eps;
    rep.diffuse = rep.rho_eps > 0.5 * rep.cell_diameter;
    return rep;
}

LocationInfo vertex_distance(ConcentrationReport& report, const DomainSpec& domain) {
    const auto verts = vertices(domain);
    LocationInfo info;
    // the report does not carry its grid; rebuild the lattice from the domain
    const auto cell = domain.cell_vectors();
    Grid lattice;
    lattice.dims = {1, 1};
    lattice.step0 = cell[0];
    lattice.step1 = cell[1];
    const bool wrap = report.periodic;
    double vmin = std::numeric_limits<double>::infinity();
    double emin = std::numeric_limits<double>::infinity();
    for (const auto& v : verts) {
        const double d = image_distance(lattice, report.x_star, wrap, [&](Vec2 p) { return norm(p - v.p); });
        info.vertex_distances.emplace_back(v.name, d);
        vmin = std::min(vmin, d);
    }
    for (std::size_t k = 0; k < verts.size(); ++k) {
        const auto& a = verts[k];
        const auto& b = verts[(k + 1) % verts.size()];
        const double d = image_distance(lattice, report.x_star, wrap,
                                        [&](Vec2 p) { return segment_distance(p, a.p, b.p); });
        info.edge_distances.emplace_back(a.name + b.name, d);
        emin = std::min(emin, d);
    }
    const double reach = 2.0 * report.rho_eps;
    if (report.diffuse) {
        info.location_class = "interior";
    } else if (vmin <= reach) {
        info.location_class = "vertex";
    } else if (emin <= reach) {
        info.location_class = "edge";
    } else {
        info.location_class = "interior";
    }
    report.location = info;
    return info;
}

DichotomyVerdict classify_dichotomy(const std::vector<ConcentrationReport>& reports, const std::vector<double>& R,
                                    double rho_fixed, double threshold) {
    if (reports.size() < 3) fail_validation("classify_dichotomy needs at least three values of R");
    if (reports.size() != R.size()) fail_validation("reports and R lists differ in length");
    DichotomyVerdict v;
    v.R = R;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(R.size());
    for (std::size_t k = 0; k < R.size(); ++k) {
        const double e = reports[k].mass_at(rho_fixed);
        v.evidence.push_back(e);
        const double x = std::log(R[k]);
        const double y = std::log(std::max(e, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    v.slope = den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    v.verdict = (v.slope < 0.0 && v.evidence.back() < threshold) ? "vanishing" : "concentration";
    return v;
}

std::vector<std::pair<double, double>> decay_profile(const Field& u, Vec2 center, bool periodic) {
    const Grid& g = u.grid();
    const double h = g.spacing();
    std::vector<double> best;
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) {
            const double r = grid_distance(g, g.position(i, j), center, periodic);
            const auto k = static_cast<std::size_t>(std::floor(r / h + 0.5));
            if (k >= best.size()) best.resize(k + 1, -1.0);
            best[k] = std::max(best[k], u.abs_at(g.index(i, j)));
        }
    }
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < best.size(); ++k) {
        if (best[k] >= 0.0) out.emplace_back(static_cast<double>(k) * h, best[k]);
    }
    return out;
}

bool equivalent(const ConcentrationReport& a, const ConcentrationReport& b) {
    return norm(a.x_star - b.x_star) <= std::max(a.rho_eps, b.rho_eps);
}

}  // namespace fracsol
