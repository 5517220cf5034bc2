#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "attract/degree_cert.hpp"

using namespace attract;
using oracle::form;

namespace {

PencilEndo prop_map(cplx eps) { return PencilEndo(form({4, -4, 1}), form({0, 0, 1}), form({0, 1, 1}), eps); }

double rho_of(const PencilEndo& f) { return trapping_constants(f, sphere_extrema(f.P(), f.Q(), f.R())).rho; }

}  // namespace

TEST_CASE("unconstrained counts equal the topological degree") {
    const PencilEndo f = prop_map(cplx(2e-3, 1e-3));
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        const P2 x({rng.complex_normal(), rng.complex_normal(), rng.complex_normal()});
        CHECK(count_preimages_in(f, x, 1, Region::All, 0.1).weighted == 4);
        CHECK(count_preimages_in(f, x, 2, Region::All, 0.1).weighted == 16);
    }
    const P2 x = make_p2(cplx(0.3, 0.1), 1.0, 0.2);
    CHECK(count_preimages_in(f, x, 3, Region::All, 0.1).weighted == 64);
    CHECK_THROWS_AS(count_preimages_in(f, x, 12, Region::All, 0.1), Error);
}

TEST_CASE("counts agree with long double enumeration") {
    const PencilEndo f = prop_map(1e-3);
    const double rho = rho_of(f);
    const oracle::QuadraticTree tree{{4, -4, 1}, {0, 0, 1}, {0, 1, 1}, 1e-3L, static_cast<long double>(rho)};
    Rng rng(4);
    for (int i = 0; i < 40; ++i) {
        const P2 x0 = sample_U(rng, rho);
        std::array<oracle::QuadraticTree::lc, 3> y{x0[0], x0[1], x0[2]};
        PreciseLift py = precise_lift(x0);
        const int m = 1 + i % 2;
        for (int k = 0; k <= m; ++k) {
            y = tree.apply(y);
            py = precise_apply(f, py);
        }
        const int u = count_preimages_in(f, py, m, Region::U, rho).weighted;
        const int fu = count_preimages_in(f, py, m, Region::FU, rho).weighted;
        CHECK(u == tree.count(y, m, false));
        CHECK(fu == tree.count(y, m, true));
        CHECK(fu >= 1);
        CHECK(fu <= u);
        CHECK(count_preimages_in(f, py, m, Region::U, rho, true).weighted == u);
    }
}

TEST_CASE("degree certificate on the quadratic example") {
    const PencilEndo f = prop_map(4e-5);
    const double rho = rho_of(f);
    const DegreeCertificate c = certify_degree(f, rho, 3, 200, 9);
    CHECK(c.threshold == 8);
    CHECK(c.samples == 200);
    CHECK(c.verdict);
    CHECK(c.max_count <= 4);
    CHECK(c.min_count >= 1);
    CHECK(c.max_count_pruned == c.max_count);
    CHECK(c.dt_one_step >= 1);
    CHECK(c.dt_one_step <= 4);

    const DegreeCertificate again = certify_degree(f, rho, 3, 200, 9);
    CHECK(again.max_count == c.max_count);
    CHECK(again.mean_count == c.mean_count);
    CHECK(chordal(again.worst_point, c.worst_point) == 0.0);
}

TEST_CASE("degree certificate fails on an invariant line") {
    SUBCASE("power map") {
        const PencilEndo f(form({0, 0, 1}), form({1, 0, 0}), form({0, 0, 1}), 0.0);
        for (int m = 1; m <= 2; ++m) {
            const DegreeCertificate c = certify_degree(f, 0.5, m, 20, 3);
            CHECK_FALSE(c.verdict);
            // Samples sit a hair off the line, so all d^{2m} preimages land in U.
            CHECK(c.max_count == c.threshold * c.threshold);
        }
        const auto rate = asymptotic_rate(f, 0.5, make_p2(cplx(0.2, 0.7), 1.0, 0.0), 4);
        // Exactly on the line only d^n distinct points remain.
        REQUIRE(rate.size() == 4);
        for (const auto& [n, r] : rate) CHECK(r == doctest::Approx(2.0));
    }
    SUBCASE("squares with eps z^2") {
        const PencilEndo f(form({0, 0, 1}), form({1, 0, 0}), form({0, 0, 1}), 1e-3);
        const DegreeCertificate c = certify_degree(f, rho_of(f), 3, 50, 3);
        CHECK_FALSE(c.verdict);
        CHECK(c.max_count == 8);
    }
}

TEST_CASE("asymptotic rate first entry is a one-step count") {
    const PencilEndo f = prop_map(4e-5);
    const double rho = rho_of(f);
    Rng rng(2);
    const P2 p = iterate(f, sample_U(rng, rho), 5);
    const auto rate = asymptotic_rate(f, rho, p, 3);
    CHECK(rate[0].second == doctest::Approx(count_preimages_in(f, p, 1, Region::U, rho).distinct));
    for (const auto& [n, r] : rate) CHECK(r <= 2.0);
}
