#include "fracsol/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "fracsol/error.hpp"

namespace fracsol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe; execution on new arrays is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan r2r_plan(int n0, int n1, fftw_r2r_kind k0, fftw_r2r_kind k1) {
    static std::map<std::tuple<int, int, int, int>, fftw_plan> cache;
    std::lock_guard lock(plan_mutex());
    const auto key = std::make_tuple(n0, n1, static_cast<int>(k0), static_cast<int>(k1));
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    double* buf = fftw_alloc_real(static_cast<std::size_t>(n0) * n1);
    fftw_plan p = fftw_plan_r2r_2d(n0, n1, buf, buf, k0, k1, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    cache.emplace(key, p);
    return p;
}

fftw_plan dft_plan(int n0, int n1, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard lock(plan_mutex());
    const auto key = std::make_tuple(n0, n1, sign);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n0) * n1);
    fftw_plan p = fftw_plan_dft_2d(n0, n1, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    cache.emplace(key, p);
    return p;
}

bool axis_is_dirichlet(const SpectralSymbol& sym, int axis) {
    switch (sym.basis) {
        case Regime::dirichlet: return true;
        case Regime::mixed_dn: return sym.bc.dirichlet_axis == axis;
        default: return false;
    }
}

// Orthonormal scaling per axis for the half-sample transforms.
std::vector<double> forward_scale(int n, bool dirichlet) {
    std::vector<double> f(static_cast<std::size_t>(n), std::sqrt(1.0 / (2.0 * n)));
    f[dirichlet ? static_cast<std::size_t>(n - 1) : 0] = std::sqrt(1.0 / (4.0 * n));
    return f;
}

std::vector<double> inverse_scale(int n, bool dirichlet) {
    std::vector<double> g(static_cast<std::size_t>(n), 1.0 / std::sqrt(2.0 * n));
    g[dirichlet ? static_cast<std::size_t>(n - 1) : 0] = 1.0 / std::sqrt(static_cast<double>(n));
    return g;
}

void real_transform(std::vector<double>& data, const SpectralSymbol& sym, bool fwd) {
    const Grid& g = *sym.grid;
    const int n0 = g.dims[0];
    const int n1 = g.dims[1];
    const bool d0 = axis_is_dirichlet(sym, 0);
    const bool d1 = axis_is_dirichlet(sym, 1);
    const auto f0 = fwd ? forward_scale(n0, d0) : inverse_scale(n0, d0);
    const auto f1 = fwd ? forward_scale(n1, d1) : inverse_scale(n1, d1);
    const double w = fwd ? std::sqrt(g.weight) : 1.0 / std::sqrt(g.weight);
    if (!fwd) {
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j) data[g.index(i, j)] *= w * f0[i] * f1[j];
    }
    const auto k0 = fwd ? (d0 ? FFTW_RODFT10 : FFTW_REDFT10) : (d0 ? FFTW_RODFT01 : FFTW_REDFT01);
    const auto k1 = fwd ? (d1 ? FFTW_RODFT10 : FFTW_REDFT10) : (d1 ? FFTW_RODFT01 : FFTW_REDFT01);
    fftw_execute_r2r(r2r_plan(n0, n1, k0, k1), data.data(), data.data());
    if (fwd) {
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j) data[g.index(i, j)] *= w * f0[i] * f1[j];
    }
}

// Bloch phase e^{i theta . xi} per axis, xi the fractional cell coordinate of the node.
std::vector<std::complex<double>> axis_phase(int n, double offset, double theta) {
    std::vector<std::complex<double>> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[i] = std::polar(1.0, theta * (i + offset) / n);
    return p;
}

void complex_transform(std::vector<std::complex<double>>& data, const SpectralSymbol& sym, bool fwd) {
    const Grid& g = *sym.grid;
    const int n0 = g.dims[0];
    const int n1 = g.dims[1];
    const double th0 = sym.basis == Regime::quasi_periodic ? sym.bc.theta1 : 0.0;
    const double th1 = sym.basis == Regime::quasi_periodic ? sym.bc.theta2 : 0.0;
    const bool phased = th0 != 0.0 || th1 != 0.0;
    std::vector<std::complex<double>> p0, p1;
    if (phased) {
        p0 = axis_phase(n0, g.offset, th0);
        p1 = axis_phase(n1, g.offset, th1);
    }
    const double total = static_cast<double>(g.size());
    if (fwd) {
        if (phased) {
            for (int i = 0; i < n0; ++i)
                for (int j = 0; j < n1; ++j) data[g.index(i, j)] *= std::conj(p0[i] * p1[j]);
        }
        fftw_execute_dft(dft_plan(n0, n1, FFTW_FORWARD), reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()));
        const double c = std::sqrt(g.weight) / std::sqrt(total);
        for (auto& x : data) x *= c;
    } else {
        fftw_execute_dft(dft_plan(n0, n1, FFTW_BACKWARD), reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()));
        const double c = 1.0 / (std::sqrt(g.weight) * std::sqrt(total));
        for (auto& x : data) x *= c;
        if (phased) {
            for (int i = 0; i < n0; ++i)
                for (int j = 0; j < n1; ++j) data[g.index(i, j)] *= p0[i] * p1[j];
        }
    }
}

void check_compatible(const Grid& grid, const BoundaryCondition& bc) {
    const auto kind = grid.domain.kind;
    switch (bc.regime) {
        case Regime::neumann:
        case Regime::dirichlet:
            if (kind == DomainKind::parallelogram) {
                fail_validation("Neumann/Dirichlet regimes are not available on parallelograms");
            }
            break;
        case Regime::mixed_dn:
            if (!grid.domain.is_rectangular()) fail_validation("mixed_dn requires a rectangle");
            break;
        case Regime::periodic:
            break;
        case Regime::quasi_periodic:
            if (grid.domain.is_triangle()) {
                fail_validation("quasi_periodic requires a parallelogram or rectangle");
            }
            break;
    }
}

}  // namespace

std::size_t SpectralSymbol::zero_modes() const {
    std::size_t z = 0;
    for (double m : mu) z += m == 0.0 ? 1 : 0;
    return z;
}

SpectralSymbol symbol(GridPtr grid, const BoundaryCondition& bc) {
    check_compatible(*grid, bc);
    SpectralSymbol sym;
    sym.grid = grid;
    sym.bc = bc;
    sym.basis = bc.regime;
    if (grid->torus && (bc.regime == Regime::neumann || bc.regime == Regime::dirichlet)) {
        sym.basis = Regime::periodic;
    }
    const Grid& g = *grid;
    const int n0 = g.dims[0];
    const int n1 = g.dims[1];
    sym.mu.resize(g.size());
    if (!sym.complex_basis()) {
        const double l0 = norm(g.lattice0());
        const double l1 = norm(g.lattice1());
        const bool d0 = axis_is_dirichlet(sym, 0);
        const bool d1 = axis_is_dirichlet(sym, 1);
        for (int i = 0; i < n0; ++i) {
            const double a = kPi * (i + (d0 ? 1 : 0)) / l0;
            for (int j = 0; j < n1; ++j) {
                const double b = kPi * (j + (d1 ? 1 : 0)) / l1;
                sym.mu[g.index(i, j)] = a * a + b * b;
            }
        }
        return sym;
    }
    const Vec2 l0 = g.lattice0();
    const Vec2 l1 = g.lattice1();
    const double det = cross(l0, l1);
    const Vec2 b0{l1.y / det, -l1.x / det};
    const Vec2 b1{-l0.y / det, l0.x / det};
    const double th0 = sym.basis == Regime::quasi_periodic ? bc.theta1 : 0.0;
    const double th1 = sym.basis == Regime::quasi_periodic ? bc.theta2 : 0.0;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            double best = std::numeric_limits<double>::infinity();
            // shortest wavevector among the aliases of DFT index (i, j)
            for (int a = -2; a <= 1; ++a) {
                for (int b = -2; b <= 1; ++b) {
                    const double m0 = kTwoPi * (i + a * n0) + th0;
                    const double m1 = kTwoPi * (j + b * n1) + th1;
                    const Vec2 k = m0 * b0 + m1 * b1;
                    best = std::min(best, dot(k, k));
                }
            }
            sym.mu[g.index(i, j)] = best;
        }
    }
    return sym;
}

Spectrum forward(const Field& u, const SpectralSymbol& sym) {
    if (!u.grid().same_shape(*sym.grid)) fail_validation("field does not match symbol grid");
    Spectrum c;
    if (!sym.complex_basis()) {
        c.re.assign(u.re().begin(), u.re().end());
        real_transform(c.re, sym, true);
        if (u.is_complex()) {
            c.im.assign(u.im().begin(), u.im().end());
            real_transform(c.im, sym, true);
        }
        return c;
    }
    std::vector<std::complex<double>> data(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) data[n] = u.at(n);
    complex_transform(data, sym, true);
    c.re.resize(data.size());
    c.im.resize(data.size());
    for (std::size_t n = 0; n < data.size(); ++n) {
        c.re[n] = data[n].real();
        c.im[n] = data[n].imag();
    }
    return c;
}

Field inverse(const Spectrum& c, const SpectralSymbol& sym, bool complex_out) {
    if (!sym.complex_basis()) {
        std::vector<double> re = c.re;
        real_transform(re, sym, false);
        if (c.is_complex()) {
            std::vector<double> im = c.im;
            real_transform(im, sym, false);
            return Field(sym.grid, std::move(re), std::move(im));
        }
        return Field(sym.grid, std::move(re));
    }
    std::vector<std::complex<double>> data(c.re.size());
    for (std::size_t n = 0; n < data.size(); ++n) data[n] = {c.re[n], c.im.empty() ? 0.0 : c.im[n]};
    complex_transform(data, sym, false);
    std::vector<double> re(data.size());
    for (std::size_t n = 0; n < data.size(); ++n) re[n] = data[n].real();
    if (!complex_out) return Field(sym.grid, std::move(re));
    std::vector<double> im(data.size());
    for (std::size_t n = 0; n < data.size(); ++n) im[n] = data[n].imag();
    return Field(sym.grid, std::move(re), std::move(im));
}

Field apply_multiplier(const Field& u, const SpectralSymbol& sym, const std::vector<double>& multiplier) {
    Spectrum c = forward(u, sym);
    for (std::size_t k = 0; k < c.re.size(); ++k) c.re[k] *= multiplier[k];
    for (std::size_t k = 0; k < c.im.size(); ++k) c.im[k] *= multiplier[k];
    const bool complex_out = u.is_complex() || !sym.bc.preserves_real();
    return inverse(c, sym, complex_out);
}

std::vector<double> symbol_power(const SpectralSymbol& sym, double s) {
    std::vector<double> out(sym.mu.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double m = sym.mu[k];
        out[k] = m == 0.0 ? 0.0 : (s == 1.0 ? m : std::pow(m, s));
    }
    return out;
}

Field apply_fraclap(const Field& u, const SpectralSymbol& sym, double s) {
    return apply_multiplier(u, sym, symbol_power(sym, s));
}

double seminorm_sq(const Field& u, const SpectralSymbol& sym, double s) {
    return FractionalOperator(sym, s).seminorm_sq(u);
}

double support_separation_defect(const Field& v1, const Field& v2, const SpectralSymbol& sym, double s) {
    require_same_grid(v1, v2);
    const FractionalOperator op(sym, s);
    return std::abs(op.seminorm_sq(v1 + v2) - op.seminorm_sq(v1) - op.seminorm_sq(v2));
}

FractionalOperator::FractionalOperator(SpectralSymbol sym, double s)
    : sym_(std::move(sym)), s_(s), mu_s_(symbol_power(sym_, s)) {
    if (!(s > 0.0) || s > 1.0) fail_validation("fractional order s must lie in (0, 1]");
    resolvent_.resize(mu_s_.size());
    for (std::size_t k = 0; k < mu_s_.size(); ++k) resolvent_[k] = 1.0 / (mu_s_[k] + 1.0);
}

double FractionalOperator::seminorm_sq(const Field& u) const {
    const Spectrum c = forward(u, sym_);
    double acc = 0.0;
    for (std::size_t k = 0; k < mu_s_.size(); ++k) acc += mu_s_[k] * c.abs2(k);
    return acc;
}

}  // namespace fracsol
