#pragma once

#include "fracsol/spectral.hpp"

namespace fracsol {

/// Order s, exponent q and the symbol fixing the boundary regime.
struct EnergyParams {
    double s = 0.5;
    double q = 4.0;
    SpectralSymbol symbol;

    /// Critical Sobolev exponent 2n/(n-2s) for n = 2; +inf when 2s >= 2.
    double critical_exponent() const;
    /// Throws a validation error naming the admissible range q in (2, 2*_s).
    void validate() const;
};

struct Residual {
    double l2 = 0.0;   // ||(-Delta)^s u + u - |u|^{q-2}u||_{L2} / ||u||_{H^s}
    double hms = 0.0;  // same residual in the H^{-s} norm (coefficients / (mu^s + 1))
};

/// J, its gradient and the Euler-Lagrange residual on a fixed symbol.
class Energy {
public:
    explicit Energy(const EnergyParams& params);

    const EnergyParams& params() const { return params_; }
    const FractionalOperator& op() const { return op_; }

    /// ||u||_{H^s}^2 = [u]^2 + ||u||_{L2}^2
    double hs_norm_sq(const Field& u) const;
    double quotient(const Field& u) const;
    /// L2 gradient of J.
    Field gradient(const Field& u) const;
    /// Quotient and gradient sharing one operator application.
    std::pair<double, Field> quotient_and_gradient(const Field& u) const;
    /// c*u with ||c u||_q = J(u)^{1/(q-2)}.
    Field nehari_normalize(const Field& u) const;
    Residual residual(const Field& u) const;

private:
    EnergyParams params_;
    FractionalOperator op_;
};

double quotient_J(const Field& u, const EnergyParams& p);
Field gradient_J(const Field& u, const EnergyParams& p);
Field nehari_normalize(const Field& u, const EnergyParams& p);
double el_residual(const Field& u, const EnergyParams& p);

}  // namespace fracsol
