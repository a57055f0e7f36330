#include <doctest.h>

#include <cmath>

#include "segreflow/grid.hpp"

using namespace segreflow;

static Field sampled(const Grid& g, double (*fn)(double)) {
    Field f = make_field(g);
    for (int i = 0; i < g.total; ++i) f.v[i] = fn(g.coord(0, i));
    return f;
}

TEST_CASE("grid spacing counts boundary points") {
    Grid g = build_grid_1d(1.0, 1000);
    CHECK(g.h[0] == doctest::Approx(1.0 / 1001).epsilon(1e-15));
    CHECK(g.total == 1000);
    CHECK(g.measure == g.h[0]);

    Grid g2 = build_grid_2d(1.0, 1.0, 127, 127);
    CHECK(g2.h[0] == doctest::Approx(1.0 / 128).epsilon(1e-15));
    CHECK(g2.h[1] == doctest::Approx(1.0 / 128).epsilon(1e-15));
    CHECK(g2.total == 127 * 127);
    CHECK(g2.measure == doctest::Approx(1.0 / (128.0 * 128.0)).epsilon(1e-15));
}

TEST_CASE("grid construction rejects bad input") {
    CHECK_THROWS_AS(build_grid_1d(0.0, 10), config_error);
    CHECK_THROWS_AS(build_grid_1d(-1.0, 10), config_error);
    CHECK_THROWS_AS(build_grid_1d(1.0, 0), config_error);
    CHECK_THROWS_AS(build_grid_2d(1.0, 1.0, 5, 0), config_error);
}

TEST_CASE("inner product weights by cell measure") {
    Grid g = build_grid_1d(1.0, 999);
    Field ones = make_field(g, 1.0);
    CHECK(l2_inner(ones, ones) == doctest::Approx(0.999).epsilon(1e-14));
}

TEST_CASE("discrete sine modes are orthogonal") {
    Grid g = build_grid_1d(1.0, 500);
    Field s1 = sampled(g, [](double x) { return std::sin(M_PI * x); });
    Field s2 = sampled(g, [](double x) { return std::sin(2.0 * M_PI * x); });
    CHECK(std::abs(l2_inner(s1, s2)) <= 1e-12);
}

TEST_CASE("inner product is symmetric and bilinear") {
    Grid g = build_grid_1d(1.0, 200);
    rng_t rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field a = make_field(g), b = make_field(g), c = make_field(g);
    for (int i = 0; i < g.total; ++i) {
        a.v[i] = u(rng);
        b.v[i] = u(rng);
        c.v[i] = u(rng);
    }
    CHECK(l2_inner(a, b) == l2_inner(b, a));
    Field bc = make_field(g);
    for (int i = 0; i < g.total; ++i) bc.v[i] = 2.0 * b.v[i] + 3.0 * c.v[i];
    double lhs = l2_inner(a, bc);
    double rhs = 2.0 * l2_inner(a, b) + 3.0 * l2_inner(a, c);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("fields on different grids cannot be mixed") {
    Grid g1 = build_grid_1d(1.0, 100);
    Grid g2 = build_grid_1d(1.0, 100);
    Field a = make_field(g1), b = make_field(g2);
    CHECK_THROWS_AS(l2_inner(a, b), invariant_error);
}

TEST_CASE("support mask thresholds against the peak") {
    Grid g = build_grid_1d(1.0, 599);
    Field s = sampled(g, [](double x) { return std::sin(M_PI * x); });
    SubdomainMask m = support_mask(s, 0.5);
    // sin(pi x) > 0.5 on (1/6, 5/6); boundary within one cell
    int first = -1, last = -1;
    for (int i = 0; i < g.total; ++i)
        if (m.on[i]) {
            if (first < 0) first = i;
            last = i;
        }
    CHECK(std::abs(g.coord(0, first) - 1.0 / 6.0) <= 1.5 * g.h[0]);
    CHECK(std::abs(g.coord(0, last) - 5.0 / 6.0) <= 1.5 * g.h[0]);
}

TEST_CASE("support mask rejects the zero field") {
    Grid g = build_grid_1d(1.0, 50);
    Field z = make_field(g);
    CHECK_THROWS_AS(support_mask(z, 0.5), config_error);
}

TEST_CASE("sign-changing mode splits into two mask components") {
    Grid g = build_grid_1d(1.0, 999);
    Field s = sampled(g, [](double x) { return std::sin(2.0 * M_PI * x); });
    SubdomainMask m = support_mask(s, 1e-3);
    CHECK(mask_component_count(m) == 2);
}

TEST_CASE("support mask shrinks as the threshold grows") {
    Grid g = build_grid_1d(1.0, 400);
    Field s = sampled(g, [](double x) { return std::sin(M_PI * x); });
    SubdomainMask lo = support_mask(s, 0.1);
    SubdomainMask hi = support_mask(s, 0.6);
    CHECK(hi.count_on < lo.count_on);
    for (int i = 0; i < g.total; ++i)
        if (hi.on[i]) CHECK(lo.on[i]);
}

TEST_CASE("open rectangles give disjoint touching masks") {
    Grid g = build_grid_1d(1.0, 999);  // x = 0.5 is a grid point
    SubdomainMask left = mask_from_rects(g, {{0.0, 0.5, 0.0, 0.0}});
    SubdomainMask right = mask_from_rects(g, {{0.5, 1.0, 0.0, 0.0}});
    CHECK(masks_disjoint(left, right));
    CHECK(left.count_on + right.count_on == g.total - 1);  // midpoint uncovered
}

TEST_CASE("2D mask components across a gap") {
    Grid g = build_grid_2d(1.0, 1.0, 31, 31);
    SubdomainMask m = mask_from_rects(
        g, {{0.0, 0.4, 0.0, 1.0}, {0.6, 1.0, 0.0, 1.0}});
    CHECK(mask_component_count(m) == 2);
}
