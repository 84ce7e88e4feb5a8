#include "fracsol/field.hpp"

#include <algorithm>
#include <cmath>

#include "fracsol/error.hpp"

namespace fracsol {

Field::Field(GridPtr grid, bool complex) : grid_(std::move(grid)) {
    re_.assign(grid_->size(), 0.0);
    if (complex) im_.assign(grid_->size(), 0.0);
}

Field::Field(GridPtr grid, std::vector<double> re) : grid_(std::move(grid)), re_(std::move(re)) {
    if (re_.size() != grid_->size()) fail_validation("field length does not match grid size");
}

Field::Field(GridPtr grid, std::vector<double> re, std::vector<double> im)
    : grid_(std::move(grid)), re_(std::move(re)), im_(std::move(im)) {
    if (re_.size() != grid_->size() || (!im_.empty() && im_.size() != re_.size())) {
        fail_validation("field length does not match grid size");
    }
}

void Field::promote_to_complex() {
    if (im_.empty()) im_.assign(re_.size(), 0.0);
}

void Field::make_real() { im_.clear(); }

Field& Field::operator+=(const Field& other) {
    axpy(1.0, other);
    return *this;
}

Field& Field::operator-=(const Field& other) {
    axpy(-1.0, other);
    return *this;
}

Field& Field::operator*=(double c) {
    for (auto& x : re_) x *= c;
    for (auto& x : im_) x *= c;
    return *this;
}

void Field::axpy(double c, const Field& x) {
    require_same_grid(*this, x);
    if (x.is_complex()) promote_to_complex();
    for (std::size_t n = 0; n < re_.size(); ++n) re_[n] += c * x.re_[n];
    if (x.is_complex()) {
        for (std::size_t n = 0; n < im_.size(); ++n) im_[n] += c * x.im_[n];
    }
}

void require_same_grid(const Field& a, const Field& b) {
    if (a.size() != b.size() || !a.grid().same_shape(b.grid())) {
        fail_validation("field shape mismatch");
    }
}

double inner(const Field& u, const Field& v) {
    require_same_grid(u, v);
    double acc = 0.0;
    const auto ur = u.re();
    const auto vr = v.re();
    for (std::size_t n = 0; n < ur.size(); ++n) acc += ur[n] * vr[n];
    if (u.is_complex() && v.is_complex()) {
        const auto ui = u.im();
        const auto vi = v.im();
        for (std::size_t n = 0; n < ui.size(); ++n) acc += ui[n] * vi[n];
    }
    return acc * u.grid().weight;
}

double lq_power(const Field& u, double q) {
    double acc = 0.0;
    if (q == 2.0) {
        for (std::size_t n = 0; n < u.size(); ++n) {
            const double a = u.abs_at(n);
            acc += a * a;
        }
    } else if (q == 4.0) {
        for (std::size_t n = 0; n < u.size(); ++n) {
            const double a = u.abs_at(n);
            acc += (a * a) * (a * a);
        }
    } else {
        for (std::size_t n = 0; n < u.size(); ++n) acc += std::pow(u.abs_at(n), q);
    }
    return acc * u.grid().weight;
}

double l2_norm(const Field& u) { return std::sqrt(lq_power(u, 2.0)); }

double lq_norm(const Field& u, double q) { return std::pow(lq_power(u, q), 1.0 / q); }

std::pair<double, double> norms(const Field& u, double q) {
    if (q < 1.0) fail_validation("norm exponent q must be >= 1");
    return {l2_norm(u), lq_norm(u, q)};
}

double max_abs(const Field& u) {
    double m = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) m = std::max(m, u.abs_at(n));
    return m;
}

bool is_zero(const Field& u) { return max_abs(u) == 0.0; }

Field power_nonlinearity(const Field& u, double q) {
    Field out = u;
    auto re = out.re();
    if (!u.is_complex()) {
        for (auto& x : re) {
            const double a = std::abs(x);
            x = q == 4.0 ? a * a * x : (a == 0.0 ? 0.0 : std::pow(a, q - 2.0) * x);
        }
        return out;
    }
    auto im = out.im();
    for (std::size_t n = 0; n < re.size(); ++n) {
        const double a = std::hypot(re[n], im[n]);
        const double f = q == 4.0 ? a * a : (a == 0.0 ? 0.0 : std::pow(a, q - 2.0));
        re[n] *= f;
        im[n] *= f;
    }
    return out;
}

Field modulus(const Field& u) {
    std::vector<double> a(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) a[n] = u.abs_at(n);
    return Field(u.grid_ptr(), std::move(a));
}

}  // namespace fracsol
