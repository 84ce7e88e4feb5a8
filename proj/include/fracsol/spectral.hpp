#pragma once

#include <functional>
#include <vector>

#include "fracsol/field.hpp"

namespace fracsol {

/// Continuum Laplacian eigenvalue per transform mode, laid out like the grid
/// (row-major over dims).  Real regimes use half-sample cosine/sine modes per
/// axis; periodic and quasi-periodic regimes use DFT modes with the
/// shortest-wavevector alias.
struct SpectralSymbol {
    GridPtr grid;
    BoundaryCondition bc;
    /// Transform actually used.  Triangle domains carry a Neumann or Dirichlet
    /// regime but are realized on their periodic torus.
    Regime basis = Regime::neumann;
    std::vector<double> mu;

    bool complex_basis() const {
        return basis == Regime::periodic || basis == Regime::quasi_periodic;
    }
    std::size_t zero_modes() const;
};

SpectralSymbol symbol(GridPtr grid, const BoundaryCondition& bc);

/// Mode coefficients normalized so that sum |c|^2 equals the grid L2 norm squared.
struct Spectrum {
    std::vector<double> re;
    std::vector<double> im;  // empty for real bases

    bool is_complex() const { return !im.empty(); }
    double abs2(std::size_t k) const {
        return im.empty() ? re[k] * re[k] : re[k] * re[k] + im[k] * im[k];
    }
};

Spectrum forward(const Field& u, const SpectralSymbol& sym);
/// Inverse transform; `complex_out` keeps the imaginary part for complex bases.
Field inverse(const Spectrum& c, const SpectralSymbol& sym, bool complex_out);

/// Multiplies mode k by multiplier[k] (laid out like sym.mu).
Field apply_multiplier(const Field& u, const SpectralSymbol& sym, const std::vector<double>& multiplier);

/// mu^s with 0^s := 0.
std::vector<double> symbol_power(const SpectralSymbol& sym, double s);

/// (-Delta)^s applied by symbol multiplication.
Field apply_fraclap(const Field& u, const SpectralSymbol& sym, double s);

/// sum_k mu_k^s |c_k|^2
double seminorm_sq(const Field& u, const SpectralSymbol& sym, double s);

/// |[v1+v2]^2 - [v1]^2 - [v2]^2|
double support_separation_defect(const Field& v1, const Field& v2, const SpectralSymbol& sym, double s);

/// Precomputed fractional power on a fixed symbol; safe to share across threads.
class FractionalOperator {
public:
    FractionalOperator(SpectralSymbol sym, double s);

    const SpectralSymbol& symbol() const { return sym_; }
    double s() const { return s_; }
    const std::vector<double>& mu_s() const { return mu_s_; }

    Field apply(const Field& u) const { return apply_multiplier(u, sym_, mu_s_); }
    double seminorm_sq(const Field& u) const;
    /// Applies (mu^s + 1)^{-1}.
    Field apply_resolvent(const Field& u) const { return apply_multiplier(u, sym_, resolvent_); }

private:
    SpectralSymbol sym_;
    double s_;
    std::vector<double> mu_s_;
    std::vector<double> resolvent_;
};

}  // namespace fracsol
