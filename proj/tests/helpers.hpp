#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fracsol/field.hpp"

namespace testing {

inline double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline fracsol::Field random_field(const fracsol::GridPtr& g, std::uint64_t seed, bool complex = false) {
    std::mt19937_64 rng(seed);
    fracsol::Field u(g, complex);
    for (auto& x : u.re()) x = 2.0 * uniform(rng) - 1.0;
    for (auto& x : u.im()) x = 2.0 * uniform(rng) - 1.0;
    return u;
}

template <class F>
fracsol::Field sample(const fracsol::GridPtr& g, F f) {
    fracsol::Field u(g, false);
    for (int i = 0; i < g->dims[0]; ++i) {
        for (int j = 0; j < g->dims[1]; ++j) u.re()[g->index(i, j)] = f(g->position(i, j));
    }
    return u;
}

inline fracsol::Field gaussian(const fracsol::GridPtr& g, fracsol::Vec2 c, double w) {
    return sample(g, [&](fracsol::Vec2 p) {
        const double d = fracsol::norm(p - c);
        return std::exp(-d * d / (w * w));
    });
}

inline double max_diff(const fracsol::Field& a, const fracsol::Field& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.at(n) - b.at(n)));
    return m;
}

inline double max_abs_value(const fracsol::Field& a) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, a.abs_at(n));
    return m;
}

}  // namespace testing
