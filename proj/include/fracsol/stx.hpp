#pragma once

#include <memory>
#include <vector>

#include "fracsol/spectral.hpp"

namespace fracsol {

/// K_nu(tau) from the integral of exp(-tau cosh th) cosh(nu th); nu is used as |nu|.
double bessel_K(double nu, double tau);
/// exp(tau) K_nu(tau), finite for large tau.
double bessel_K_scaled(double nu, double tau);

/// Q_s(tau) = 2^{1-s} tau^s K_s(tau) / Gamma(s), Q_s(0) = 1.
double q_profile(double s, double tau);
/// dQ_s/dtau = -(2^{1-s}/Gamma(s)) tau^s K_{1-s}(tau).
double q_profile_derivative(double s, double tau);

/// 4^s Gamma(1+s) / (2s Gamma(1-s))
double c_s(double s);

/// Geometric nodes t_i = t_first * ratio^i, i < count, ending at T.
struct TGrid {
    std::vector<double> t;
    double ratio = 1.0;

    double first() const { return t.front(); }
    double last() const { return t.back(); }
    std::size_t size() const { return t.size(); }
};

TGrid geometric_tgrid(double t_first, double t_last, int count);
/// t_first = 1e-6/sqrt(mu_max), T = reach/sqrt(mu_min) over nonzero modes.
TGrid default_tgrid(const SpectralSymbol& sym, int count = 400, double reach = 30.0);

/// Q_s(t_i sqrt(mu)) and d/dt of it for every distinct eigenvalue of a symbol.
struct ProfileTable {
    SpectralSymbol sym;
    double s = 0.5;
    TGrid tg;
    std::vector<double> mu;           // distinct eigenvalues, ascending
    std::vector<std::size_t> group;   // mode -> index into mu
    std::vector<std::vector<double>> q;   // [g][i]
    std::vector<std::vector<double>> dq;  // [g][i], derivative in t
};

std::shared_ptr<const ProfileTable> make_profile_table(const SpectralSymbol& sym, double s, const TGrid& tg);

/// d_k(t_i) = c_k Q_s(t_i sqrt(mu_k)); the mu = 0 mode is constant in t.
struct STExtension {
    std::shared_ptr<const ProfileTable> table;
    Spectrum coeff;

    double s() const { return table->s; }
    const SpectralSymbol& symbol() const { return table->sym; }
    const TGrid& tgrid() const { return table->tg; }
};

STExtension st_extend(const Field& u, const SpectralSymbol& sym, double s, const TGrid& tg);
STExtension st_extend(const Field& u, std::shared_ptr<const ProfileTable> table);

/// w(., 0+) rebuilt from the coefficients (Q_s(0) = 1).
Field st_trace(const STExtension& w);
/// w(., t_i)
Field st_slice(const STExtension& w, std::size_t i);

struct EnergyIdentity {
    double energy = 0.0;     // E(w)
    double cs_energy = 0.0;  // C_s E(w)
    double seminorm = 0.0;   // [u]^2
    double gap = 0.0;        // |C_s E - [u]^2| / [u]^2, 0 when [u] = 0
};

EnergyIdentity st_energy(const STExtension& w);

/// -C_s lim_{t->0} t^{1-2s} d/dt w by Richardson extrapolation per mode.
Field neumann_trace(const STExtension& w);

/// (E(eta w) - E(w)) / ||u||_{H^s}^2 with eta = eta(dist(x, omega)/r) eta(t/(2r)).
double cutoff_energy_defect(const Field& u, const SpectralSymbol& sym, double s, const std::vector<char>& omega,
                            double r, const TGrid& tg);

}  // namespace fracsol
