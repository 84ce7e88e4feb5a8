#include "fracsol/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fracsol/diagnostics.hpp"
#include "fracsol/error.hpp"

namespace fracsol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduces k * theta modulo 2 pi, snapping rounding residue near 0 or 2 pi to 0.
double wrapped_multiple(int k, double theta) {
    double t = std::fmod(k * theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t < 1e-12 || kTwoPi - t < 1e-12) return 0.0;
    return t;
}

Regime expected_regime(TilingMode mode) {
    switch (mode) {
        case TilingMode::even: return Regime::neumann;
        case TilingMode::odd: return Regime::dirichlet;
        case TilingMode::mixed: return Regime::mixed_dn;
        case TilingMode::quasi_phase: return Regime::quasi_periodic;
    }
    return Regime::neumann;
}

}  // namespace

std::string to_string(TilingMode mode) {
    switch (mode) {
        case TilingMode::even: return "even";
        case TilingMode::odd: return "odd";
        case TilingMode::mixed: return "mixed";
        case TilingMode::quasi_phase: return "quasi_phase";
    }
    return "unknown";
}

TilingMode tiling_mode_from_string(const std::string& name) {
    for (auto m : {TilingMode::even, TilingMode::odd, TilingMode::mixed, TilingMode::quasi_phase}) {
        if (to_string(m) == name) return m;
    }
    fail_validation("unknown tiling mode '" + name + "'");
}

void TilingSpec::validate() const {
    if (copies[0] < 1 || copies[1] < 1) fail_validation("tiling copies must be >= 1 per axis");
    if (mode == TilingMode::mixed && dirichlet_axis != 0 && dirichlet_axis != 1) {
        fail_validation("mixed tiling dirichlet_axis must be 0 or 1");
    }
}

Extended extend(const Field& u, const BoundaryCondition& bc, const TilingSpec& spec) {
    spec.validate();
    const Grid& g = u.grid();
    const DomainSpec& dom = g.domain;
    const Regime want = expected_regime(spec.mode);
    const bool regime_ok = bc.regime == want ||
                           (spec.mode == TilingMode::quasi_phase && bc.regime == Regime::periodic);
    if (!regime_ok) {
        fail_validation("tiling mode " + to_string(spec.mode) + " does not match boundary regime " +
                        to_string(bc.regime));
    }
    if (spec.mode == TilingMode::mixed && !dom.is_rectangular()) fail_validation("mixed tiling requires a rectangle");
    if (spec.mode == TilingMode::mixed && spec.dirichlet_axis != bc.dirichlet_axis) {
        fail_validation("mixed tiling axis differs from the solve's dirichlet axis");
    }
    double th1 = 0.0;
    double th2 = 0.0;
    if (spec.mode == TilingMode::quasi_phase) {
        if (dom.is_triangle()) fail_validation("quasi_phase tiling requires a parallelogram or rectangle");
        const auto want_bc = BoundaryCondition::quasi_periodic(spec.theta1, spec.theta2);
        const double b1 = bc.regime == Regime::periodic ? 0.0 : bc.theta1;
        const double b2 = bc.regime == Regime::periodic ? 0.0 : bc.theta2;
        if (std::abs(want_bc.theta1 - b1) > 1e-12 || std::abs(want_bc.theta2 - b2) > 1e-12) {
            fail_validation("quasi_phase tiling phases differ from the solve's phases");
        }
        th1 = b1;
        th2 = b2;
    }

    if (dom.is_rectangular() && spec.mode != TilingMode::quasi_phase &&
        ((spec.copies[0] % 2) || (spec.copies[1] % 2))) {
        fail_validation("mirror tilings need even copy counts to close periodically");
    }
    const int k0 = spec.copies[0];
    const int k1 = spec.copies[1];
    const int n0 = g.dims[0];
    const int n1 = g.dims[1];
    DomainSpec big;
    const auto cell = dom.cell_vectors();
    if (dom.is_rectangular()) {
        big = DomainSpec::rectangle(k0 * dom.a, k1 * dom.b, dom.scale);
    } else {
        big = DomainSpec::parallelogram(static_cast<double>(k0) * cell[0], static_cast<double>(k1) * cell[1], 1.0);
    }
    // big cells are tori in the periodic sense; rectangles keep their cell-centered layout
    const GridPtr bg = build_grid_dims(big, {k0 * n0, k1 * n1});

    const bool mirror = dom.is_rectangular() && spec.mode != TilingMode::quasi_phase;
    const bool complex_out = u.is_complex() || !BoundaryCondition::quasi_periodic(th1, th2).preserves_real();
    Field out(bg, complex_out);
    for (int a = 0; a < k0; ++a) {
        for (int b = 0; b < k1; ++b) {
            std::complex<double> factor{1.0, 0.0};
            if (spec.mode == TilingMode::odd && mirror) factor = ((a + b) % 2) ? -1.0 : 1.0;
            if (spec.mode == TilingMode::mixed) {
                const int flips = spec.dirichlet_axis == 0 ? a : b;
                factor = (flips % 2) ? -1.0 : 1.0;
            }
            if (spec.mode == TilingMode::quasi_phase) factor = std::polar(1.0, a * th1 + b * th2);
            for (int i = 0; i < n0; ++i) {
                const int si = (mirror && a % 2) ? n0 - 1 - i : i;
                for (int j = 0; j < n1; ++j) {
                    const int sj = (mirror && b % 2) ? n1 - 1 - j : j;
                    const std::complex<double> v = factor * u.at(g.index(si, sj));
                    const std::size_t m = bg->index(a * n0 + i, b * n1 + j);
                    out.re()[m] = v.real();
                    if (complex_out) out.im()[m] = v.imag();
                }
            }
        }
    }
    Extended ext;
    ext.field = std::move(out);
    const double b1 = wrapped_multiple(k0, th1);
    const double b2 = wrapped_multiple(k1, th2);
    ext.bc = (b1 == 0.0 && b2 == 0.0) ? BoundaryCondition::periodic() : BoundaryCondition::quasi_periodic(b1, b2);
    return ext;
}

Extended extend(const Solution& sol, const TilingSpec& spec) { return extend(sol.field, sol.bc, spec); }

ExtensionCheck verify_extension(const Extended& ext, double s, double q, double fundamental_residual) {
    EnergyParams p;
    p.s = s;
    p.q = q;
    p.symbol = symbol(ext.field.grid_ptr(), ext.bc);
    const Energy energy(p);
    ExtensionCheck c;
    c.residual = energy.residual(ext.field);
    c.fundamental_residual = fundamental_residual;
    c.accepted = c.residual.l2 <= 2.0 * fundamental_residual + 1e-8;
    return c;
}

std::vector<StructurePoint> structure_map(const Field& u, double q, bool periodic) {
    const Grid& g = u.grid();
    const int n0 = g.dims[0];
    const int n1 = g.dims[1];
    std::vector<double> dens(u.size());
    double top = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        dens[n] = std::pow(u.abs_at(n), q);
        top = std::max(top, dens[n]);
    }
    std::vector<StructurePoint> raw;
    if (top == 0.0) return raw;
    const bool wrap = periodic || g.torus;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            const double d = dens[g.index(i, j)];
            if (d <= 0.5 * top) continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1 && is_max; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    int ii = i + di;
                    int jj = j + dj;
                    if (wrap) {
                        ii = (ii + n0) % n0;
                        jj = (jj + n1) % n1;
                    } else if (ii < 0 || jj < 0 || ii >= n0 || jj >= n1) {
                        continue;
                    }
                    is_max = d >= dens[g.index(ii, jj)];
                }
            }
            if (!is_max) continue;
            StructurePoint p;
            p.position = g.position(i, j);
            p.density = d;
            const auto v = u.at(g.index(i, j));
            p.sign = v.real() >= 0.0 ? 1 : -1;
            p.phase = std::arg(v);
            raw.push_back(p);
        }
    }
    // plateaus of equal maxima collapse to their mean position
    const double merge = 2.0 * std::max(norm(g.step0), norm(g.step1));
    std::vector<StructurePoint> out;
    std::vector<int> count;
    std::vector<Vec2> offset_sum;
    for (const auto& p : raw) {
        bool merged = false;
        for (std::size_t k = 0; k < out.size() && !merged; ++k) {
            const Vec2 d = wrap ? g.min_image(p.position - out[k].position) : p.position - out[k].position;
            if (norm(d) <= merge && p.sign == out[k].sign) {
                offset_sum[k] = offset_sum[k] + d;
                ++count[k];
                if (p.density > out[k].density) {
                    out[k].density = p.density;
                    out[k].phase = p.phase;
                }
                merged = true;
            }
        }
        if (!merged) {
            out.push_back(p);
            count.push_back(1);
            offset_sum.push_back({0.0, 0.0});
        }
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].position = out[k].position + (1.0 / count[k]) * offset_sum[k];
    }
    return out;
}

}  // namespace fracsol
