#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"

using namespace attract;
using oracle::form;

namespace {

bool has_root(const RootSet& rs, const P1& p, int mult, double tol = 1e-8) {
    return std::any_of(rs.begin(), rs.end(),
                       [&](const RootEntry& e) { return e.multiplicity == mult && chordal(e.point, p) < tol; });
}

BinaryForm random_form(Rng& rng, int d) {
    std::vector<cplx> c;
    for (int j = 0; j <= d; ++j) c.push_back(rng.complex_normal());
    return BinaryForm(c);
}

}  // namespace

TEST_CASE("projective points are canonical") {
    const P2 a({cplx(0, 2), 1.0, 0.5});
    const P2 b({cplx(0, -6), cplx(-3), cplx(-1.5)});
    CHECK(chordal(a, b) < 1e-15);
    CHECK(a[0].imag() == 0.0);
    CHECK(a[0].real() > 0.0);
    double n = 0;
    for (auto c : a.lift()) n += std::norm(c);
    CHECK(n == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(P1({0.0, 0.0}), Error);
}

TEST_CASE("chordal distance examples") {
    CHECK(chordal_distance(make_p1(1, 0), make_p1(0, 1)) == doctest::Approx(1.0));
    const P1 p = make_p1(cplx(0.3, 0.1), cplx(-2, 1));
    CHECK(chordal_distance(p, p) < 1e-15);
    CHECK(chordal_distance(make_p1(1, 1), make_p1(1, -1)) == doctest::Approx(1.0));
}

TEST_CASE("chordal distance ignores lift scaling") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const cplx a = rng.complex_normal(), b = rng.complex_normal(), c = rng.complex_normal(), e = rng.complex_normal();
        const cplx s = rng.complex_normal() * 10.0, s2 = rng.complex_normal() * 0.01;
        const std::array<cplx, 2> u{a, b}, v{c, e}, us{s * a, s * b}, vs{s2 * c, s2 * e};
        const double d0 = chordal_lift(u, v), d1 = chordal_lift(us, vs);
        CHECK(std::abs(d0 - d1) <= 1e-12 * std::max(d0, 1e-300));
        CHECK(chordal_distance(P1(u), P1(v)) == doctest::Approx(chordal_distance(P1(v), P1(u))).epsilon(1e-14));
    }
}

TEST_CASE("binary form evaluation is homogeneous") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const BinaryForm f = random_form(rng, 1 + i % 6);
        const cplx z = rng.complex_normal(), w = rng.complex_normal();
        const cplx lambda = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * kPi));
        const cplx lhs = f(lambda * z, lambda * w), rhs = std::pow(lambda, f.degree()) * f(z, w);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    }
}

TEST_CASE("roots examples") {
    const RootSet zw = roots(form({0, 1, 0}));
    CHECK(zw.size() == 2);
    CHECK(has_root(zw, make_p1(1, 0), 1));
    CHECK(has_root(zw, make_p1(0, 1), 1));

    const RootSet sq = roots(form({4, -4, 1}));  // (z - 2w)^2
    REQUIRE(sq.size() == 1);
    CHECK(has_root(sq, make_p1(2, 1), 2));

    // 1*(z-2w)^2 - 0*z^2 is the fiber equation of [(z-2w)^2 : z^2] over [0:1].
    const RootSet fib = roots(form({4, -4, 1}).scaled(1.0) - form({0, 0, 1}).scaled(0.0));
    CHECK(has_root(fib, make_p1(2, 1), 2));
}

TEST_CASE("roots of a product are the union of roots") {
    Rng rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        const BinaryForm f = random_form(rng, 1 + trial % 4), g = random_form(rng, 1 + (trial / 4) % 4);
        const RootSet rf = roots(f), rg = roots(g), rfg = roots(BinaryForm((f * g).coeffs()));
        CHECK(total_multiplicity(rfg) == f.degree() + g.degree());
        for (const auto* part : {&rf, &rg})
            for (const auto& e : *part) {
                const bool found = std::any_of(rfg.begin(), rfg.end(),
                                               [&](const RootEntry& x) { return chordal(x.point, e.point) < 1e-6; });
                CHECK(found);
            }
    }
}

TEST_CASE("roots meet the backward-error tolerance") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const BinaryForm f = random_form(rng, 2 + trial % 12);
        const RootSet rs = roots(f);
        CHECK(total_multiplicity(rs) == f.degree());
        for (const auto& e : rs) CHECK(std::abs(f(e.point)) / f.norm2() < 1e-12);
    }
}

TEST_CASE("roots handle roots at both poles") {
    const RootSet rs = roots(form({0, 0, 3, 1, 0}));  // z^2 w (3w + z) w ... = z^2 w (z + 3w)
    CHECK(total_multiplicity(rs) == 4);
    CHECK(has_root(rs, make_p1(0, 1), 2));
    CHECK(has_root(rs, make_p1(1, 0), 1));
    CHECK(has_root(rs, make_p1(-3, 1), 1));
}

TEST_CASE("resultant examples") {
    CHECK(std::abs(resultant(form({0, 0, 1}), form({1, 0, 0})) - 1.0) < 1e-14);
    CHECK(std::abs(resultant(form({0, 1, 0}), form({0, 0, 1}))) < 1e-14);
    const std::int64_t exact = oracle::integer_resultant({4, -4, 1}, {0, 0, 1});
    CHECK(exact == 16);
    CHECK(std::abs(resultant(form({4, -4, 1}), form({0, 0, 1})) - cplx(double(exact))) < 1e-12);
}

TEST_CASE("resultant matches the exact integer oracle") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 4;
        std::vector<std::int64_t> a, b;
        std::vector<cplx> ac, bc;
        for (int j = 0; j <= d; ++j) {
            a.push_back(static_cast<std::int64_t>(rng.next_u64() % 7) - 3);
            b.push_back(static_cast<std::int64_t>(rng.next_u64() % 7) - 3);
            ac.emplace_back(double(a.back()));
            bc.emplace_back(double(b.back()));
        }
        if (std::all_of(a.begin(), a.end(), [](auto v) { return v == 0; })) continue;
        if (std::all_of(b.begin(), b.end(), [](auto v) { return v == 0; })) continue;
        const double exact = double(oracle::integer_resultant(a, b));
        const cplx got = resultant(BinaryForm(ac), BinaryForm(bc));
        CHECK(std::abs(got - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("resultant vanishes exactly when roots are shared") {
    Rng rng(23);
    for (int trial = 0; trial < 80; ++trial) {
        const int d = 1 + trial % 4;
        std::vector<P1> ra, rb;
        for (int j = 0; j < d; ++j) ra.push_back(rng.p1());
        for (int j = 0; j < d; ++j) rb.push_back(rng.p1());
        const bool share = trial % 2 == 0;
        if (share) rb[0] = ra[rng.next_u64() % ra.size()];
        const BinaryForm f = BinaryForm::from_roots(ra, rng.complex_normal());
        const BinaryForm g = BinaryForm::from_roots(rb, rng.complex_normal());
        const bool zero = relative_resultant(f, g) < 1e-10;
        const RootSet rf = roots(f), rg = roots(g);
        bool common = false;
        for (const auto& x : rf)
            for (const auto& y : rg) common = common || chordal(x.point, y.point) < 1e-6;
        CHECK(zero == common);
    }
}

TEST_CASE("critical points examples") {
    const RootSet power = critical_points(form({0, 0, 1}), form({1, 0, 0}));
    CHECK(has_root(power, make_p1(1, 0), 1));
    CHECK(has_root(power, make_p1(0, 1), 1));

    const RootSet shifted = critical_points(form({0.1, 0, 1}), form({1, 0, 0}));
    CHECK(has_root(shifted, make_p1(1, 0), 1));
    CHECK(has_root(shifted, make_p1(0, 1), 1));

    const RootSet prop = critical_points(form({4, -4, 1}), form({0, 0, 1}));
    CHECK(has_root(prop, make_p1(0, 1), 1));
    CHECK(has_root(prop, make_p1(2, 1), 1));
    CHECK(total_multiplicity(prop) == 2);
}

TEST_CASE("sphere extrema examples") {
    const SphereExtrema power = sphere_extrema(form({0, 0, 1}), form({1, 0, 0}), form({0, 0, 1}));
    CHECK(power.alpha_lo <= 1.0);
    CHECK(power.alpha_lo > 0.999);
    CHECK(power.beta_hi >= 1.0);

    const SphereExtrema swap = sphere_extrema(form({1, 0, 0}), form({0, 0, 1}), form({1, 2, 1}));
    CHECK(swap.alpha_lo <= 1.0);
    CHECK(swap.alpha_lo > 0.999);
    CHECK(swap.beta_hi >= 4.0);

    const BinaryForm p = form({4, -4, 1}), q = form({0, 0, 1}), r = form({0, 1, 1});
    const SphereExtrema prop = sphere_extrema(p, q, r);
    const double brute = oracle::brute_alpha(p, q, 1000000, 99);
    CHECK(prop.alpha_lo > 0.0);
    CHECK(prop.alpha_lo <= brute);
    CHECK(prop.alpha_lo >= 0.95 * brute);
}

TEST_CASE("sphere extrema bracket random samples") {
    Rng rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const BinaryForm p = random_form(rng, 2 + trial % 3), q = random_form(rng, 2 + trial % 3),
                         r = random_form(rng, 2 + trial % 3);
        const SphereExtrema ex = sphere_extrema(p, q, r);
        CHECK(oracle::brute_alpha(p, q, 100000, 100 + trial) >= ex.alpha_lo);
        CHECK(oracle::brute_beta(r, 100000, 200 + trial) <= ex.beta_hi);
        CHECK(ex.alpha_lo <= ex.alpha_seen);
    }
}

TEST_CASE("sphere extrema rejects a common zero") {
    CHECK_THROWS_AS(sphere_extrema(form({0, 1, 0}), form({0, 0, 1}), form({1, 0, 0})), Error);
}
