#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracsol/error.hpp"
#include "fracsol/stx.hpp"
#include "helpers.hpp"

using namespace fracsol;

namespace {

constexpr double kPi = std::numbers::pi;

Field constant(const GridPtr& g, double c) {
    Field u(g, false);
    for (auto& x : u.re()) x = c;
    return u;
}

Field cos_mode(const GridPtr& g) {
    return testing::sample(g, [](Vec2 p) { return std::sqrt(2.0) * std::cos(kPi * p.x); });
}

std::vector<char> ball(const Grid& g, Vec2 c, double radius) {
    std::vector<char> m(g.size(), 0);
    for (int i = 0; i < g.dims[0]; ++i) {
        for (int j = 0; j < g.dims[1]; ++j) m[g.index(i, j)] = norm(g.position(i, j) - c) <= radius;
    }
    return m;
}

}  // namespace

TEST_CASE("Bessel K against closed forms and the standard library") {
    CHECK(bessel_K(0.5, 1.0) == doctest::Approx(std::sqrt(kPi / 2) * std::exp(-1.0)).epsilon(1e-12));
    CHECK(bessel_K(0.5, 2.0) == doctest::Approx(std::sqrt(kPi / 4) * std::exp(-2.0)).epsilon(1e-12));
    for (double nu : {0.1, 0.25, 0.3, 0.5, 0.6, 0.75, 0.9}) {
        for (double tau = 1e-3; tau <= 50.0; tau *= 1.7) {
            const double ref = std::cyl_bessel_k(nu, tau);
            CHECK(std::abs(bessel_K(nu, tau) - ref) <= 1e-10 * ref);
            CHECK(std::abs(bessel_K_scaled(nu, tau) - std::exp(tau) * ref) <= 1e-10 * std::exp(tau) * ref);
        }
    }
    // leading small-tau term; at tau = 0.01 the next term tau^{0.3} still moves K by 6%
    auto lead = [](double tau) { return std::tgamma(0.3) * std::pow(2.0, -0.7) * std::pow(tau, -0.3); };
    auto two = [&](double tau) { return lead(tau) + std::tgamma(-0.3) * std::pow(2.0, -1.3) * std::pow(tau, 0.3); };
    CHECK(std::abs(bessel_K(0.3, 1e-4) / lead(1e-4) - 1.0) < 0.02);
    CHECK(std::abs(bessel_K(0.3, 0.01) / two(0.01) - 1.0) < 0.002);
    CHECK_THROWS_AS(bessel_K(0.5, 0.0), Error);
}

TEST_CASE("Q profile") {
    CHECK(q_profile(0.3, 0.0) == 1.0);
    for (double tau : {0.01, 0.5, 1.0, 3.0, 20.0}) {
        CHECK(q_profile(0.5, tau) == doctest::Approx(std::exp(-tau)).epsilon(1e-12));
        CHECK(q_profile_derivative(0.5, tau) == doctest::Approx(-std::exp(-tau)).epsilon(1e-12));
    }
    CHECK(q_profile(0.7, 5.0) < std::exp(-4.0));
    for (double s : {0.25, 0.75}) {
        double prev = 1.0;
        for (double tau = 1e-3; tau < 40.0; tau *= 1.3) {
            const double q = q_profile(s, tau);
            CHECK(q < prev);
            CHECK(q > 0.0);
            prev = q;
            // derivative against a central difference of the profile
            const double d = 1e-6 * tau;
            const double fd = (q_profile(s, tau + d) - q_profile(s, tau - d)) / (2 * d);
            CHECK(std::abs(fd - q_profile_derivative(s, tau)) <= 1e-5 * std::abs(fd) + 1e-10);
        }
    }
    CHECK_THROWS_AS(q_profile(0.5, -1.0), Error);
}

TEST_CASE("C_s") {
    CHECK(c_s(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    for (double s : {0.25, 0.75}) {
        CHECK(c_s(s) == doctest::Approx(std::pow(4.0, s) * std::tgamma(1 + s) / (2 * s * std::tgamma(1 - s))).epsilon(1e-14));
    }
}

TEST_CASE("extension of simple fields") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1), 16);
    const auto sym = symbol(g, BoundaryCondition::neumann());
    const TGrid tg = default_tgrid(sym);
    CHECK(tg.size() == 400);
    CHECK(tg.ratio > 1.0);
    for (std::size_t i = 1; i < tg.size(); ++i) CHECK(tg.t[i] > tg.t[i - 1]);

    const auto w1 = st_extend(constant(g, 1.0), sym, 0.5, tg);
    CHECK(testing::max_diff(st_slice(w1, 250), constant(g, 1.0)) < 1e-13);
    CHECK(st_energy(w1).energy == 0.0);
    CHECK(testing::max_abs_value(neumann_trace(w1)) < 1e-13);

    const Field c = cos_mode(g);
    const auto wc = st_extend(c, sym, 0.5, tg);
    for (std::size_t i : {0UL, 100UL, 200UL, 300UL}) {
        Field want = c;
        want *= std::exp(-kPi * tg.t[i]);
        CHECK(testing::max_diff(st_slice(wc, i), want) < 1e-12);
    }
    const auto ec = st_energy(wc);
    CHECK(ec.energy == doctest::Approx(kPi).epsilon(1e-8));
    CHECK(ec.gap < 1e-8);
    Field tr = c;
    tr *= kPi;
    CHECK(testing::max_diff(neumann_trace(wc), tr) < 1e-4 * kPi);

    const auto g8 = build_grid(DomainSpec::rectangle(1, 1), 8);
    const auto s8 = symbol(g8, BoundaryCondition::dirichlet());
    const Field u = testing::random_field(g8, 12);
    CHECK(testing::max_diff(st_trace(st_extend(u, s8, 0.4, default_tgrid(s8))), u) < 1e-10);
}

TEST_CASE("per-mode energy equals mu^s / C_s") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1), 16);
    const auto sym = symbol(g, BoundaryCondition::neumann());
    const Field c = cos_mode(g);
    for (double s : {0.25, 0.4, 0.5, 0.75}) {
        const auto e = st_energy(st_extend(c, sym, s, default_tgrid(sym)));
        CHECK(std::abs(e.energy - std::pow(kPi * kPi, s) / c_s(s)) <= 1e-4 * e.energy);
    }
}

TEST_CASE("energy identity and trace relation on random fields") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1.5), 16);
    for (const auto& bc : {BoundaryCondition::neumann(), BoundaryCondition::dirichlet()}) {
        const auto sym = symbol(g, bc);
        const TGrid tg = default_tgrid(sym);
        for (double s : {0.25, 0.4, 0.5, 0.6, 0.75}) {
            const auto table = make_profile_table(sym, s, tg);
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                const Field u = testing::random_field(g, seed);
                const auto w = st_extend(u, table);
                CHECK(st_energy(w).gap < 1e-4);
                const Field a = apply_fraclap(u, sym, s);
                const Field b = neumann_trace(w);
                CHECK(std::sqrt(inner(Field(a) -= b, Field(a) -= b)) <= 1e-4 * l2_norm(a));
            }
        }
    }
}

TEST_CASE("cutoff energy defect") {
    const auto dom = DomainSpec::rectangle(1, 1, 8.0);
    const auto g = build_grid(dom, 4);
    const auto sym = symbol(g, BoundaryCondition::neumann());
    const TGrid tg = default_tgrid(sym);
    const Field bump = testing::gaussian(g, {4, 4}, 0.5);
    const double diam = 8.0 * std::sqrt(2.0);

    // eta == 1 wherever w lives: omega covers the cell and 2r exceeds the t-range
    const std::vector<char> all(g->size(), 1);
    CHECK(std::abs(cutoff_energy_defect(bump, sym, 0.5, all, tg.last(), tg)) < 1e-12);

    const auto omega = ball(*g, {4, 4}, 1.4);
    CHECK(cutoff_energy_defect(bump, sym, 0.5, omega, diam / 4, tg) < 0.05);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 4; ++k) {
        const double d = cutoff_energy_defect(bump, sym, 0.5, omega, diam / 16 * std::pow(2.0, k), tg);
        CHECK(d <= prev);
        prev = d;
    }
    // at s = 1/4 the sequence is not monotone step by step; its log-log trend still falls
    std::vector<double> lr, ld;
    for (int k = 0; k <= 4; ++k) {
        const double r = diam / 16 * std::pow(2.0, k);
        lr.push_back(std::log(r));
        ld.push_back(std::log(std::abs(cutoff_energy_defect(bump, sym, 0.25, omega, r, tg))));
    }
    double mr = 0, md = 0;
    for (std::size_t k = 0; k < lr.size(); ++k) {
        mr += lr[k] / lr.size();
        md += ld[k] / ld.size();
    }
    double num = 0, den = 0;
    for (std::size_t k = 0; k < lr.size(); ++k) {
        num += (lr[k] - mr) * (ld[k] - md);
        den += (lr[k] - mr) * (lr[k] - mr);
    }
    CHECK(num / den < 0.0);

    // support far from omega: the cutoff annihilates w, so the defect is -E(w) / ||u||^2
    const Field far = testing::gaussian(g, {6.5, 6.5}, 0.3);
    const auto corner = ball(*g, {0.5, 0.5}, 0.5);
    const double e = st_energy(st_extend(far, sym, 0.5, tg)).energy;
    const double hs = seminorm_sq(far, sym, 0.5) + inner(far, far);
    CHECK(cutoff_energy_defect(far, sym, 0.5, corner, 1.0, tg) == doctest::Approx(-e / hs).epsilon(1e-2));
}

TEST_CASE("extension oracle errors") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1), 8);
    const auto sym = symbol(g, BoundaryCondition::neumann());
    const auto short_reach = default_tgrid(sym, 400, 5.0);
    CHECK_THROWS_AS(st_energy(st_extend(testing::random_field(g, 1), sym, 0.5, short_reach)), Error);
    CHECK_THROWS_AS(st_extend(constant(g, 1.0), symbol(g, BoundaryCondition::periodic()), 0.5, default_tgrid(sym)), Error);
    const std::vector<char> all(g->size(), 1);
    CHECK_THROWS_AS(cutoff_energy_defect(constant(g, 1.0), sym, 0.5, all, 0.1, default_tgrid(sym)), Error);
    CHECK_THROWS_AS(cutoff_energy_defect(constant(g, 1.0), sym, 0.5, std::vector<char>(g->size(), 0), 1.0, default_tgrid(sym)),
                    Error);
    CHECK_THROWS_AS(geometric_tgrid(1.0, 0.5, 10), Error);
    CHECK_THROWS_AS(st_extend(constant(g, 1.0), sym, 1.0, default_tgrid(sym)), Error);
}
