#include "fracsol/energy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fracsol/error.hpp"

namespace fracsol {

namespace {

void require_nonzero(const Field& u) {
    if (is_zero(u)) fail_validation("quotient is undefined for the zero field");
}

}  // namespace

double EnergyParams::critical_exponent() const {
    constexpr double n = 2.0;
    if (2.0 * s >= n) return std::numeric_limits<double>::infinity();
    return 2.0 * n / (n - 2.0 * s);
}

void EnergyParams::validate() const {
    if (!(s > 0.0) || s > 1.0) fail_validation("s must lie in (0, 1]");
    const double crit = critical_exponent();
    // the endpoint q = 2*_s is admitted: the Galerkin problem stays well posed there
    if (!(q > 2.0) || !(q <= crit)) {
        std::ostringstream os;
        os << "q = " << q << " violates q∈(2,2*_s) with 2*_s = " << crit;
        fail_validation(os.str());
    }
    if (!symbol.grid) fail_validation("energy parameters need a spectral symbol");
}

Energy::Energy(const EnergyParams& params) : params_(params), op_(params.symbol, params.s) {
    params_.validate();
}

double Energy::hs_norm_sq(const Field& u) const { return op_.seminorm_sq(u) + lq_power(u, 2.0); }

double Energy::quotient(const Field& u) const {
    require_nonzero(u);
    const double lq = lq_norm(u, params_.q);
    return hs_norm_sq(u) / (lq * lq);
}

std::pair<double, Field> Energy::quotient_and_gradient(const Field& u) const {
    require_nonzero(u);
    const double q = params_.q;
    const Field au = op_.apply(u);
    const double semi = inner(au, u);
    const double lq_pow = lq_power(u, q);
    const double lq2 = std::pow(lq_pow, 2.0 / q);
    const double j = (semi + lq_power(u, 2.0)) / lq2;
    // (2/||u||_q^2) [A u + u - J ||u||_q^{2-q} |u|^{q-2} u]
    Field g = au;
    g += u;
    g.axpy(-j * lq2 / lq_pow, power_nonlinearity(u, q));
    g *= 2.0 / lq2;
    return {j, std::move(g)};
}

Field Energy::gradient(const Field& u) const { return quotient_and_gradient(u).second; }

Field Energy::nehari_normalize(const Field& u) const {
    const double j = quotient(u);
    const double c = std::pow(j, 1.0 / (params_.q - 2.0)) / lq_norm(u, params_.q);
    return c * u;
}

Residual Energy::residual(const Field& u) const {
    if (is_zero(u)) return {};
    Field r = op_.apply(u);
    r += u;
    r -= power_nonlinearity(u, params_.q);
    const double scale = std::sqrt(hs_norm_sq(u));
    Residual out;
    out.l2 = l2_norm(r) / scale;
    const Spectrum c = forward(r, op_.symbol());
    const auto& mus = op_.mu_s();
    double acc = 0.0;
    for (std::size_t k = 0; k < mus.size(); ++k) acc += c.abs2(k) / (mus[k] + 1.0);
    out.hms = std::sqrt(acc) / scale;
    return out;
}

double quotient_J(const Field& u, const EnergyParams& p) { return Energy(p).quotient(u); }

Field gradient_J(const Field& u, const EnergyParams& p) { return Energy(p).gradient(u); }

Field nehari_normalize(const Field& u, const EnergyParams& p) { return Energy(p).nehari_normalize(u); }

double el_residual(const Field& u, const EnergyParams& p) { return Energy(p).residual(u).l2; }

}  // namespace fracsol
