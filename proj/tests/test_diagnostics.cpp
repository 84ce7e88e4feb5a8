#include <doctest.h>

#include <cmath>

#include "fracsol/diagnostics.hpp"
#include "fracsol/error.hpp"
#include "fracsol/tiling.hpp"
#include "helpers.hpp"

using namespace fracsol;

namespace {

Field constant(const GridPtr& g, double c) {
    Field u(g, false);
    for (auto& x : u.re()) x = c;
    return u;
}

}  // namespace

TEST_CASE("single bump at a node") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1, 16.0), 4);
    const Vec2 c = g->position(20, 30);
    const Field u = testing::gaussian(g, c, 0.4);
    const auto r = concentration_report(u, 4.0);
    CHECK(r.node == g->index(20, 30));
    CHECK(norm(r.x_star - c) < 1e-12);
    CHECK(r.weight >= 0.99);
    CHECK(r.rho_eps < 2.0);
    CHECK_FALSE(r.multi_bubble);
    CHECK_FALSE(r.diffuse);
    for (std::size_t k = 1; k < r.mass_profile.size(); ++k) CHECK(r.mass_profile[k] >= r.mass_profile[k - 1]);
    CHECK(std::abs(r.mass_profile.back() - 1.0) <= 1e-12);
    CHECK(r.radii.size() == 64);
    CHECK(r.radii.front() == doctest::Approx(0.25));
    CHECK(r.radii.back() == doctest::Approx(16.0 * std::sqrt(2.0)));
}

TEST_CASE("constant field is diffuse and interior") {
    const auto dom = DomainSpec::rectangle(1, 1, 8.0);
    const auto g = build_grid(dom, 4);
    auto r = concentration_report(constant(g, 1.0), 4.0);
    CHECK(r.diffuse);
    CHECK(r.rho_eps > 0.5 * r.cell_diameter);
    vertex_distance(r, dom);
    CHECK(r.location.location_class == "interior");
    CHECK(r.weight > 0.0);
    CHECK(r.weight <= 1.0);
}

TEST_CASE("two equal far-apart bumps") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1, 16.0), 4);
    Field u = testing::gaussian(g, g->position(12, 12), 0.4);
    u += testing::gaussian(g, g->position(52, 44), 0.4);
    const auto r = concentration_report(u, 4.0);
    CHECK(r.weight == doctest::Approx(0.5).epsilon(0.02));
    CHECK(r.multi_bubble);
    CHECK(r.rho_bubble < r.rho_eps);
}

TEST_CASE("location classes") {
    const auto dom = DomainSpec::rectangle(1, 1, 16.0);
    const auto g = build_grid(dom, 4);
    auto corner = concentration_report(testing::gaussian(g, {0, 0}, 0.4), 4.0);
    vertex_distance(corner, dom);
    CHECK(corner.location.location_class == "vertex");
    CHECK(corner.location.vertex_distances.size() == 4);
    auto edge = concentration_report(testing::gaussian(g, {8, 0}, 0.4), 4.0);
    vertex_distance(edge, dom);
    CHECK(edge.location.location_class == "edge");
    auto mid = concentration_report(testing::gaussian(g, {8, 8}, 0.4), 4.0);
    vertex_distance(mid, dom);
    CHECK(mid.location.location_class == "interior");

    const auto tri = DomainSpec::triangle_30_60_90(16.0);
    const auto gt = build_grid_dims(tri, {96, 96});
    auto rt = concentration_report(testing::gaussian(gt, {0, 0}, 0.4), 4.0);
    vertex_distance(rt, tri);
    CHECK(rt.location.location_class == "vertex");
    CHECK(rt.location.vertex_distances.front().first == "X");
    CHECK(rt.location.vertex_distances.front().second < 1e-12);
}

TEST_CASE("dichotomy") {
    const std::vector<double> R{4, 8, 16, 32};
    std::vector<ConcentrationReport> flat, bump;
    for (double r : R) {
        const auto g = build_grid(DomainSpec::rectangle(1, 1, r), 4);
        flat.push_back(concentration_report(constant(g, std::pow(r * r, -0.25)), 4.0));
        bump.push_back(concentration_report(testing::gaussian(g, {r / 3, r / 2}, 0.5), 4.0));
    }
    const auto v = classify_dichotomy(flat, R);
    CHECK(v.verdict == "vanishing");
    CHECK(v.slope < 0.0);
    CHECK(v.evidence.back() < 0.05);
    const auto c = classify_dichotomy(bump, R);
    CHECK(c.verdict == "concentration");
    CHECK(c.evidence.back() > 0.99);
    CHECK_THROWS_AS(classify_dichotomy({bump[0], bump[1]}, {4, 8}), Error);
    CHECK_THROWS_AS(classify_dichotomy(bump, {4, 8, 16}), Error);
}

TEST_CASE("decay profiles") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1, 8.0), 4);
    for (const auto& [r, m] : decay_profile(constant(g, 1.0), {4, 4})) CHECK(m == 1.0);
    const auto prof = decay_profile(testing::gaussian(g, {4.125, 4.125}, 1.0), {4.125, 4.125});
    REQUIRE(prof.size() > 4);
    CHECK(prof.front().first == 0.0);
    for (std::size_t k = 1; k < prof.size(); ++k) CHECK(prof[k].second <= prof[k - 1].second);

    // wrapped distances on a periodic square torus: a bump at a corner decays in every direction
    const auto wrap = decay_profile(testing::gaussian(g, {0.125, 0.125}, 1.0), {0.125, 0.125}, true);
    CHECK(wrap.back().first <= 4.0 * std::sqrt(2.0) + 0.25);
    CHECK(wrap.back().second < 1e-10);
}

TEST_CASE("even extension preserves the corner bubble weight") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1, 8.0), 4);
    const Field u = testing::gaussian(g, {0, 0}, 0.6);
    const auto fund = concentration_report(u, 4.0);
    TilingSpec t;
    t.copies = {2, 2};
    const auto ext = extend(u, BoundaryCondition::neumann(), t);
    ReportOptions o;
    o.periodic = true;
    const auto big = concentration_report(ext.field, 4.0, o);
    CHECK(big.node == 0);
    CHECK(fund.node == 0);
    // x_star is the node next to the mirror corner, so the ball masses agree once the ball holds every image
    CHECK(fund.weight >= 0.99);
    CHECK(big.weight >= 0.99);
    for (double rho : {3.0, 4.0, 5.0}) CHECK(big.mass_at(rho) == doctest::Approx(fund.mass_at(rho)).epsilon(1e-6));
}

TEST_CASE("equivalence of concentration sequences and errors") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1, 16.0), 4);
    const auto a = concentration_report(testing::gaussian(g, {4, 4}, 0.4), 4.0);
    const auto b = concentration_report(testing::gaussian(g, {4.25, 4}, 0.4), 4.0);
    const auto c = concentration_report(testing::gaussian(g, {12, 12}, 0.4), 4.0);
    CHECK(equivalent(a, b));
    CHECK_FALSE(equivalent(a, c));
    CHECK_THROWS_AS(concentration_report(Field(g, false), 4.0), Error);
    ReportOptions bad;
    bad.eps = 0.6;
    CHECK_THROWS_AS(concentration_report(constant(g, 1.0), 4.0, bad), Error);
    CHECK(grid_distance(*g, {0.1, 0.1}, {15.9, 0.1}, true) == doctest::Approx(0.2));
    CHECK(grid_distance(*g, {0.1, 0.1}, {15.9, 0.1}, false) == doctest::Approx(15.8));
}
