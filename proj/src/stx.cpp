#include "fracsol/stx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracsol/error.hpp"

namespace fracsol {

namespace {

constexpr double kStep = 0.1;

// Trapezoid sums of exp(-tau (cosh th - 1)) cosh(nu th) for two orders at once.
void scaled_pair(double nu_a, double nu_b, double tau, double& ka, double& kb) {
    double sa = 0.5;
    double sb = 0.5;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 100000; ++k) {
        const double th = k * kStep;
        const double sh = std::sinh(0.5 * th);
        const double e = std::exp(-2.0 * tau * sh * sh);
        const double fa = e * std::cosh(nu_a * th);
        const double fb = e * std::cosh(nu_b * th);
        sa += fa;
        sb += fb;
        const double f = std::max(fa, fb);
        if (f < 1e-18 * std::min(sa, sb) && f <= prev) break;
        prev = f;
    }
    ka = kStep * sa;
    kb = kStep * sb;
}

double eta(double x) {
    // 1 on [0, 1/2], 0 on [1, inf), quintic blend between
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    const double y = 2.0 * (x - 0.5);
    return 1.0 - y * y * y * (10.0 - 15.0 * y + 6.0 * y * y);
}

double eta_prime(double x) {
    if (x <= 0.5 || x >= 1.0) return 0.0;
    const double y = 2.0 * (x - 0.5);
    return -2.0 * 30.0 * y * y * (1.0 - y) * (1.0 - y);
}

void require_spectral(const SpectralSymbol& sym) {
    const Regime r = sym.bc.regime;
    if (sym.complex_basis() || (r != Regime::neumann && r != Regime::dirichlet)) {
        fail_validation("the extension oracle needs a Neumann or Dirichlet symbol");
    }
}

void require_order(double s) {
    if (!(s > 0.0) || !(s < 1.0)) fail_validation("extension order s must lie in (0, 1)");
}

double min_positive_mu(const SpectralSymbol& sym) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : sym.mu) {
        if (x > 0.0) m = std::min(m, x);
    }
    return m;
}

void require_reach(const ProfileTable& tab) {
    const double reach = tab.tg.last() * std::sqrt(min_positive_mu(tab.sym));
    if (reach < 20.0) {
        std::ostringstream os;
        os << "insufficient T: T*sqrt(mu_min) = " << reach << " < 20; use T >= "
           << 25.0 / std::sqrt(min_positive_mu(tab.sym));
        throw Error(ErrorKind::validation, os.str());
    }
}

// Log-trapezoid weights over the geometric nodes: integral f dt ~ sum w_i f(t_i).
std::vector<double> log_weights(const TGrid& tg) {
    const double h = std::log(tg.ratio);
    std::vector<double> w(tg.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = h * tg.t[i];
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

}  // namespace

double bessel_K_scaled(double nu, double tau) {
    if (!(tau > 0.0)) fail_validation("bessel_K needs tau > 0");
    double a, b;
    scaled_pair(std::abs(nu), std::abs(nu), tau, a, b);
    return a;
}

double bessel_K(double nu, double tau) { return std::exp(-tau) * bessel_K_scaled(nu, tau); }

double q_profile(double s, double tau) {
    require_order(s);
    if (tau < 0.0) fail_validation("q_profile needs tau >= 0");
    if (tau == 0.0) return 1.0;
    return std::pow(2.0, 1.0 - s) * std::pow(tau, s) * bessel_K(s, tau) / std::tgamma(s);
}

double q_profile_derivative(double s, double tau) {
    require_order(s);
    if (!(tau > 0.0)) fail_validation("q_profile_derivative needs tau > 0");
    return -std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(tau, s) * bessel_K(1.0 - s, tau);
}

double c_s(double s) {
    require_order(s);
    return std::pow(4.0, s) * std::tgamma(1.0 + s) / (2.0 * s * std::tgamma(1.0 - s));
}

TGrid geometric_tgrid(double t_first, double t_last, int count) {
    if (!(t_first > 0.0) || !(t_last > t_first) || count < 3) {
        fail_validation("t-grid needs 0 < t_first < T and at least 3 nodes");
    }
    TGrid tg;
    tg.ratio = std::pow(t_last / t_first, 1.0 / (count - 1));
    tg.t.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) tg.t[static_cast<std::size_t>(i)] = t_first * std::pow(tg.ratio, i);
    tg.t.back() = t_last;
    return tg;
}

TGrid default_tgrid(const SpectralSymbol& sym, int count, double reach) {
    const double lo = min_positive_mu(sym);
    if (!std::isfinite(lo)) fail_validation("symbol has no nonzero modes");
    const double hi = *std::max_element(sym.mu.begin(), sym.mu.end());
    return geometric_tgrid(1e-6 / std::sqrt(hi), reach / std::sqrt(lo), count);
}

std::shared_ptr<const ProfileTable> make_profile_table(const SpectralSymbol& sym, double s, const TGrid& tg) {
    require_spectral(sym);
    require_order(s);
    auto tab = std::make_shared<ProfileTable>();
    tab->sym = sym;
    tab->s = s;
    tab->tg = tg;
    tab->mu = sym.mu;
    std::sort(tab->mu.begin(), tab->mu.end());
    tab->mu.erase(std::unique(tab->mu.begin(), tab->mu.end()), tab->mu.end());
    tab->group.resize(sym.mu.size());
    for (std::size_t k = 0; k < sym.mu.size(); ++k) {
        tab->group[k] = static_cast<std::size_t>(
            std::lower_bound(tab->mu.begin(), tab->mu.end(), sym.mu[k]) - tab->mu.begin());
    }
    const double norm_q = std::pow(2.0, 1.0 - s) / std::tgamma(s);
    tab->q.assign(tab->mu.size(), std::vector<double>(tg.size(), 1.0));
    tab->dq.assign(tab->mu.size(), std::vector<double>(tg.size(), 0.0));
    for (std::size_t g = 0; g < tab->mu.size(); ++g) {
        const double m = tab->mu[g];
        if (m == 0.0) continue;
        const double root = std::sqrt(m);
        for (std::size_t i = 0; i < tg.size(); ++i) {
            const double tau = tg.t[i] * root;
            if (tau > 740.0) {
                tab->q[g][i] = 0.0;
                continue;
            }
            double ks, k1s;
            scaled_pair(s, 1.0 - s, tau, ks, k1s);
            const double damp = std::exp(-tau) * norm_q * std::pow(tau, s);
            tab->q[g][i] = damp * ks;
            tab->dq[g][i] = -root * damp * k1s;
        }
    }
    return tab;
}

STExtension st_extend(const Field& u, std::shared_ptr<const ProfileTable> table) {
    if (!u.grid().same_shape(*table->sym.grid)) fail_validation("field does not match the extension symbol");
    STExtension w;
    w.coeff = forward(u, table->sym);
    w.table = std::move(table);
    return w;
}

STExtension st_extend(const Field& u, const SpectralSymbol& sym, double s, const TGrid& tg) {
    return st_extend(u, make_profile_table(sym, s, tg));
}

Field st_trace(const STExtension& w) { return inverse(w.coeff, w.symbol(), w.coeff.is_complex()); }

Field st_slice(const STExtension& w, std::size_t i) {
    const ProfileTable& tab = *w.table;
    Spectrum c = w.coeff;
    for (std::size_t k = 0; k < c.re.size(); ++k) c.re[k] *= tab.q[tab.group[k]][i];
    for (std::size_t k = 0; k < c.im.size(); ++k) c.im[k] *= tab.q[tab.group[k]][i];
    return inverse(c, tab.sym, c.is_complex());
}

EnergyIdentity st_energy(const STExtension& w) {
    const ProfileTable& tab = *w.table;
    require_reach(tab);
    const double s = tab.s;
    const TGrid& tg = tab.tg;
    const auto wts = log_weights(tg);
    const double h = std::log(tg.ratio);
    const double t1 = tg.first();
    // per distinct eigenvalue: integral of t^{1-2s} (Q_t^2 + mu Q^2)
    std::vector<double> per(tab.mu.size(), 0.0);
    const double cs = c_s(s);
    for (std::size_t g = 0; g < tab.mu.size(); ++g) {
        const double m = tab.mu[g];
        if (m == 0.0) continue;
        double acc = 0.0;
        for (std::size_t i = 0; i < tg.size(); ++i) {
            const double t = tg.t[i];
            const double dq = tab.dq[g][i];
            const double q = tab.q[g][i];
            acc += wts[i] * std::pow(t, 1.0 - 2.0 * s) * (dq * dq + m * q * q);
        }
        // [0, t1] from the small-t asymptotics, plus the first endpoint correction
        const double ms = std::pow(m, s);
        const double head_d = ms * ms * std::pow(t1, 2.0 * s) / (2.0 * s * cs * cs);
        const double head_x = m * std::pow(t1, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
        acc += head_d + head_x;
        acc += h * h / 12.0 * (2.0 * s * 2.0 * s * head_d + (2.0 - 2.0 * s) * (2.0 - 2.0 * s) * head_x);
        per[g] = acc;
    }
    EnergyIdentity out;
    double semi = 0.0;
    for (std::size_t k = 0; k < tab.sym.mu.size(); ++k) {
        const double a2 = w.coeff.abs2(k);
        out.energy += a2 * per[tab.group[k]];
        const double m = tab.sym.mu[k];
        if (m > 0.0) semi += std::pow(m, s) * a2;
    }
    out.cs_energy = cs * out.energy;
    out.seminorm = semi;
    out.gap = semi > 0.0 ? std::abs(out.cs_energy - semi) / semi : std::abs(out.cs_energy);
    return out;
}

Field neumann_trace(const STExtension& w) {
    const ProfileTable& tab = *w.table;
    const double s = tab.s;
    const double cs = c_s(s);
    const double r = tab.tg.ratio;
    const double p[3] = {2.0 - 2.0 * s, 2.0, 4.0 - 2.0 * s};
    std::vector<double> limit(tab.mu.size(), 0.0);
    auto extrapolate = [&](std::size_t g, std::size_t start) {
        double v[4];
        for (std::size_t i = 0; i < 4; ++i) {
            const double t = tab.tg.t[start + i];
            v[i] = -cs * std::pow(t, 1.0 - 2.0 * s) * tab.dq[g][start + i];
        }
        for (int level = 0; level < 3; ++level) {
            const double f = std::pow(r, p[level]);
            for (int i = 0; i + level + 1 < 4; ++i) v[i] = (f * v[i] - v[i + 1]) / (f - 1.0);
        }
        return v[0];
    };
    for (std::size_t g = 0; g < tab.mu.size(); ++g) {
        if (tab.mu[g] == 0.0) continue;
        const double a = extrapolate(g, 0);
        const double b = extrapolate(g, 1);
        if (!(std::abs(a - b) <= 1e-6 * std::abs(a))) {
            fail_validation("trace extrapolation did not converge; use a smaller first t-node");
        }
        limit[g] = a;
    }
    Spectrum c = w.coeff;
    for (std::size_t k = 0; k < c.re.size(); ++k) c.re[k] *= limit[tab.group[k]];
    for (std::size_t k = 0; k < c.im.size(); ++k) c.im[k] *= limit[tab.group[k]];
    return inverse(c, tab.sym, c.is_complex());
}

double cutoff_energy_defect(const Field& u, const SpectralSymbol& sym, double s, const std::vector<char>& omega,
                            double r, const TGrid& tg) {
    const Grid& g = u.grid();
    if (omega.size() != u.size()) fail_validation("omega mask does not match the grid");
    if (std::none_of(omega.begin(), omega.end(), [](char c) { return c != 0; })) {
        fail_validation("omega mask is empty");
    }
    if (r < 2.0 * g.spacing()) fail_validation("cutoff radius r must be at least two grid cells");
    const auto table = make_profile_table(sym, s, tg);
    require_reach(*table);
    const STExtension w = st_extend(u, table);

    // eta in x from the distance to omega
    std::vector<Vec2> pts;
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) {
            if (omega[g.index(i, j)]) pts.push_back(g.position(i, j));
        }
    }
    std::vector<double> ex(u.size());
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) {
            const std::size_t n = g.index(i, j);
            double d = 0.0;
            if (!omega[n]) {
                d = std::numeric_limits<double>::infinity();
                const Vec2 x = g.position(i, j);
                for (const auto& p : pts) d = std::min(d, norm(x - p));
            }
            ex[n] = eta(d / r);
        }
    }

    const double cs = c_s(s);
    const auto wts = log_weights(tg);
    const double t1 = tg.first();
    const Field lap = apply_fraclap(u, sym, s);
    auto energy = [&](bool cut) {
        double total = 0.0;
        for (std::size_t i = 0; i < tg.size(); ++i) {
            const double t = tg.t[i];
            const double et = cut ? eta(t / (2.0 * r)) : 1.0;
            const double det = cut ? eta_prime(t / (2.0 * r)) / (2.0 * r) : 0.0;
            Spectrum c = w.coeff;
            Spectrum cd = w.coeff;
            for (std::size_t k = 0; k < c.re.size(); ++k) {
                c.re[k] *= table->q[table->group[k]][i];
                cd.re[k] *= table->dq[table->group[k]][i];
            }
            const Field wi = inverse(c, sym, false);
            const Field wdi = inverse(cd, sym, false);
            Field v = wi;
            Field vt = wdi;
            for (std::size_t n = 0; n < u.size(); ++n) {
                const double e = cut ? ex[n] : 1.0;
                v.re()[n] = e * et * wi.re()[n];
                vt.re()[n] = e * (det * wi.re()[n] + et * wdi.re()[n]);
            }
            const Spectrum cv = forward(v, sym);
            double grad = 0.0;
            for (std::size_t k = 0; k < cv.re.size(); ++k) grad += sym.mu[k] * cv.abs2(k);
            total += wts[i] * std::pow(t, 1.0 - 2.0 * s) * (grad + lq_power(vt, 2.0));
        }
        // head [0, t1]: eta_t = 1 there
        Field lv = lap;
        Field uv = u;
        for (std::size_t n = 0; n < u.size(); ++n) {
            const double e = cut ? ex[n] : 1.0;
            lv.re()[n] *= e;
            uv.re()[n] *= e;
        }
        const Spectrum cu = forward(uv, sym);
        double grad0 = 0.0;
        for (std::size_t k = 0; k < cu.re.size(); ++k) grad0 += sym.mu[k] * cu.abs2(k);
        total += std::pow(t1, 2.0 * s) / (2.0 * s * cs * cs) * lq_power(lv, 2.0);
        total += std::pow(t1, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) * grad0;
        return total;
    };
    const double e_cut = energy(true);
    const double e_full = energy(false);
    const double hs = seminorm_sq(u, sym, s) + lq_power(u, 2.0);
    if (!(hs > 0.0)) fail_validation("cutoff defect of the zero field");
    return (e_cut - e_full) / hs;
}

}  // namespace fracsol
