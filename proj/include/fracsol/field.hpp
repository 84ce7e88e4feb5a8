#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "fracsol/domain.hpp"

namespace fracsol {

/// Sampled function on a grid.  Real fields keep `im` empty.
class Field {
public:
    Field() = default;
    Field(GridPtr grid, bool complex);
    Field(GridPtr grid, std::vector<double> re);
    Field(GridPtr grid, std::vector<double> re, std::vector<double> im);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return re_.size(); }
    bool is_complex() const { return !im_.empty(); }

    std::span<double> re() { return re_; }
    std::span<const double> re() const { return re_; }
    std::span<double> im() { return im_; }
    std::span<const double> im() const { return im_; }

    std::complex<double> at(std::size_t n) const {
        return {re_[n], im_.empty() ? 0.0 : im_[n]};
    }
    double abs_at(std::size_t n) const {
        return im_.empty() ? std::abs(re_[n]) : std::hypot(re_[n], im_[n]);
    }

    void promote_to_complex();
    /// Drops the imaginary part.
    void make_real();

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double c);
    /// this += c * x
    void axpy(double c, const Field& x);

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double c, Field a) { return a *= c; }

    bool operator==(const Field& other) const {
        return re_ == other.re_ && im_ == other.im_ && grid_->same_shape(*other.grid_);
    }

private:
    GridPtr grid_;
    std::vector<double> re_;
    std::vector<double> im_;
};

/// Throws a validation error unless a and b live on the same grid shape.
void require_same_grid(const Field& a, const Field& b);

/// Weighted inner product Re sum_n w conj(u_n) v_n.
double inner(const Field& u, const Field& v);
/// sum_n w |u_n|^q
double lq_power(const Field& u, double q);
double l2_norm(const Field& u);
double lq_norm(const Field& u, double q);
/// (L2 norm, Lq norm) with grid quadrature.
std::pair<double, double> norms(const Field& u, double q);
double max_abs(const Field& u);
bool is_zero(const Field& u);

/// Pointwise |u|^{q-2} u, continuous extension 0 at u = 0.
Field power_nonlinearity(const Field& u, double q);
/// Pointwise modulus as a real field.
Field modulus(const Field& u);

}  // namespace fracsol
