// Reference computations used only by the tests. Most use nothing beyond
// plain form evaluation; brute_gamma reuses the pointwise quantity and only
// replaces the search strategy.
#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "attract/binary_form.hpp"
#include "attract/pencil_map.hpp"
#include "attract/sampling.hpp"
#include "attract/special_sets.hpp"

namespace oracle {

using attract::cplx;

inline attract::BinaryForm form(std::initializer_list<double> c) {
    std::vector<cplx> v;
    for (double x : c) v.emplace_back(x, 0.0);
    return attract::BinaryForm(v);
}

inline attract::BinaryForm cform(std::vector<cplx> v) { return attract::BinaryForm(std::move(v)); }

/// Exact determinant of an integer matrix by fraction-free (Bareiss) elimination.
inline std::int64_t bareiss_det(std::vector<std::vector<std::int64_t>> m) {
    const std::size_t n = m.size();
    std::int64_t sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

/// Sylvester resultant of integer forms given in ascending powers of z.
inline std::int64_t integer_resultant(const std::vector<std::int64_t>& p, const std::vector<std::int64_t>& q) {
    const std::size_t m = p.size() - 1, n = q.size() - 1, size = m + n;
    std::vector<std::vector<std::int64_t>> s(size, std::vector<std::int64_t>(size, 0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k <= m; ++k) s[r][r + k] = p[m - k];
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t k = 0; k <= n; ++k) s[n + r][r + k] = q[n - k];
    return bareiss_det(s);
}

/// Smallest max(|P|,|Q|) seen on random points of {max(|z|,|w|) = 1}.
inline double brute_alpha(const attract::BinaryForm& p, const attract::BinaryForm& q, int samples, std::uint64_t seed) {
    attract::Rng rng(seed);
    double best = 1e300;
    for (int i = 0; i < samples; ++i) {
        const cplx v = rng.disc(1.0);
        const bool first = (i % 2) == 0;
        const cplx z = first ? cplx(1.0) : v, w = first ? v : cplx(1.0);
        best = std::min(best, std::max(std::abs(p(z, w)), std::abs(q(z, w))));
    }
    return best;
}

/// Largest |R| seen on random points of {max(|z|,|w|) = 1}.
inline double brute_beta(const attract::BinaryForm& r, int samples, std::uint64_t seed) {
    attract::Rng rng(seed);
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        const cplx v = rng.disc(1.0);
        const bool first = (i % 2) == 0;
        best = std::max(best, std::abs(first ? r(1.0, v) : r(v, 1.0)));
    }
    return best;
}

}  // namespace oracle

namespace oracle {

/// Roots of a z^2 + b z w + c w^2 (given ascending as {c, b, a}) by the quadratic formula.
inline std::vector<std::array<cplx, 2>> quadratic_roots(cplx c, cplx b, cplx a) {
    std::vector<std::array<cplx, 2>> out;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (std::abs(a) <= 1e-14 * scale) {
        out.push_back({cplx(1.0), cplx(0.0)});
        if (std::abs(b) <= 1e-14 * scale) out.push_back({cplx(1.0), cplx(0.0)});
        else out.push_back({-c / b, cplx(1.0)});
        return out;
    }
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    const cplx q = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0 ? disc : -disc));
    const cplx r1 = q / a;
    const cplx r2 = q != cplx(0.0) ? c / q : cplx(0.0);
    out.push_back({r1, cplx(1.0)});
    out.push_back({r2, cplx(1.0)});
    return out;
}

inline attract::P1 to_p1(const std::array<cplx, 2>& v) { return attract::P1(v); }

/// Degree-2 pair-locus oracle. For each p the partner q is the other point of
/// its base fiber (closed form); the residual compares R on fiber-normalized
/// lifts. Zeros are located by a dense sphere scan plus pattern search.
struct PairOracle {
    attract::BinaryForm P, Q, R;
    cplx omega;  // 1 for collisions of the augmented map, -1 for the twisted system

    bool partner(const std::array<cplx, 2>& p, std::array<cplx, 2>& q) const {
        const cplx pp = P(p[0], p[1]), qp = Q(p[0], p[1]);
        // pp*Q(x) - qp*P(x) = 0, quadratic in x = z/w
        const cplx c = pp * Q.coeff(0) - qp * P.coeff(0), b = pp * Q.coeff(1) - qp * P.coeff(1),
                   a = pp * Q.coeff(2) - qp * P.coeff(2);
        const auto rs = quadratic_roots(c, b, a);
        const double d0 = attract::chordal_lift(rs[0], p), d1 = attract::chordal_lift(rs[1], p);
        q = d0 > d1 ? rs[0] : rs[1];
        return std::max(d0, d1) > 1e-9;
    }

    double residual(const std::array<cplx, 2>& p0) const {
        const double n = std::sqrt(std::norm(p0[0]) + std::norm(p0[1]));
        const std::array<cplx, 2> p{p0[0] / n, p0[1] / n};
        std::array<cplx, 2> q;
        if (!partner(p, q)) return 1e300;
        const double m = std::sqrt(std::norm(q[0]) + std::norm(q[1]));
        q = {q[0] / m, q[1] / m};
        const cplx tp = P(p[0], p[1]), tq = Q(p[0], p[1]);
        const cplx sp = P(q[0], q[1]), sq = Q(q[0], q[1]);
        const cplx mu = std::abs(sp) > std::abs(sq) ? sp / tp : sq / tq;  // (P,Q)(q) = mu (P,Q)(p)
        const double tn = std::sqrt(std::norm(tp) + std::norm(tq));
        return std::abs(R(p[0], p[1]) - omega * R(q[0], q[1]) / mu) / tn;
    }

    std::vector<attract::P1> solve(int grid = 40000) const {
        auto lift_of = [](int chart, cplx x) {
            return chart == 0 ? std::array<cplx, 2>{x, cplx(1.0)} : std::array<cplx, 2>{cplx(1.0), x};
        };
        struct S {
            double h;
            std::array<cplx, 2> p;
        };
        std::vector<S> scan;
        const double golden = attract::kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < grid; ++i) {
            const double zc = 1.0 - 2.0 * (i + 0.5) / grid, half = 0.5 * std::acos(zc);
            const std::array<cplx, 2> p{cplx(std::cos(half)), std::polar(std::sin(half), -golden * i)};
            scan.push_back({residual(p), p});
        }
        std::sort(scan.begin(), scan.end(), [](const S& a, const S& b) { return a.h < b.h; });
        std::vector<attract::P1> seeds, found;
        for (const auto& s : scan) {
            if (seeds.size() >= 60) break;
            const attract::P1 sp(s.p);
            bool near = false;
            for (const auto& t : seeds) near = near || attract::chordal(t, sp) < 0.05;
            if (near) continue;
            seeds.push_back(sp);
            int chart = std::abs(s.p[0]) <= std::abs(s.p[1]) ? 0 : 1;
            cplx x = chart == 0 ? s.p[0] / s.p[1] : s.p[1] / s.p[0];
            double val = residual(lift_of(chart, x));
            for (double h = 0.05; h > 1e-15 * (1.0 + std::abs(x));) {
                bool moved = false;
                for (int dir = 0; dir < 8; ++dir) {
                    const cplx y = x + std::polar(h, dir * attract::kPi / 4);
                    const double v = residual(lift_of(chart, y));
                    if (v < val) {
                        val = v;
                        x = y;
                        moved = true;
                        break;
                    }
                }
                if (!moved) h *= 0.5;
            }
            std::array<cplx, 2> partner_lift;
            // Diagonal limits (partner collapsing onto p) belong to the critical
            // or root part and are handled separately.
            if (val < 1e-9 && partner(lift_of(chart, x), partner_lift) &&
                attract::chordal_lift(partner_lift, lift_of(chart, x)) > 1e-4) {
                const attract::P1 r(lift_of(chart, x));
                bool dup = false;
                for (const auto& t : found) dup = dup || attract::chordal(t, r) < 1e-6;
                if (!dup) found.push_back(r);
            }
        }
        return found;
    }
};

/// Brute-force minimum of the separation quantity over random base lines.
inline double brute_gamma(const attract::PencilEndo& f, const attract::SpecialSets& s, double r, int samples,
                          std::uint64_t seed) {
    attract::Rng rng(seed);
    double best = 1e300;
    for (int i = 0; i < samples; ++i) best = std::min(best, attract::gamma_at(f, s, r, rng.p1()));
    return best;
}

/// Quadratic pencil map in long double with real coefficient lists, used to
/// enumerate preimage trees without the library's solver or lift handling.
struct QuadraticTree {
    using lc = std::complex<long double>;
    std::array<long double, 3> P, Q, R;
    lc eps;
    long double rho;

    static lc ev(const std::array<long double, 3>& c, lc z, lc w) { return c[0] * w * w + c[1] * z * w + c[2] * z * z; }

    std::array<lc, 3> apply(const std::array<lc, 3>& x) const {
        return {ev(P, x[0], x[1]), ev(Q, x[0], x[1]), x[2] * x[2] + eps * ev(R, x[0], x[1])};
    }

    bool in_u(const std::array<lc, 3>& x) const { return std::abs(x[2]) < rho * std::max(std::abs(x[0]), std::abs(x[1])); }

    /// All four preimages of the lift x, generic case only.
    std::vector<std::array<lc, 3>> pre(const std::array<lc, 3>& x) const {
        // W P(u,1) - Z Q(u,1) = a u^2 + b u + c
        const lc a = x[1] * P[2] - x[0] * Q[2], b = x[1] * P[1] - x[0] * Q[1], c = x[1] * P[0] - x[0] * Q[0];
        const lc disc = std::sqrt(b * b - 4.0L * a * c);
        const lc q = -0.5L * (b + (std::real(std::conj(b) * disc) >= 0 ? disc : -disc));
        std::vector<std::array<lc, 3>> out;
        for (lc u : {q / a, c / q}) {
            const lc pu = ev(P, u, 1.0L), qu = ev(Q, u, 1.0L);
            const lc l = std::sqrt(std::abs(pu) > std::abs(qu) ? x[0] / pu : x[1] / qu);
            const lc z = l * u, w = l;
            const lc t = std::sqrt(x[2] - eps * ev(R, z, w));
            out.push_back({z, w, t});
            out.push_back({z, w, -t});
        }
        return out;
    }

    bool in_fu(const std::array<lc, 3>& x) const {
        for (const auto& y : pre(x))
            if (in_u(y)) return true;
        return false;
    }

    /// m-fold preimages of x in U (final_fu = false) or f(U).
    int count(const std::array<lc, 3>& x, int m, bool final_fu) const {
        std::vector<std::array<lc, 3>> level{x};
        for (int n = 0; n < m; ++n) {
            std::vector<std::array<lc, 3>> next;
            for (const auto& y : level)
                for (const auto& z : pre(y)) next.push_back(z);
            level = std::move(next);
        }
        int c = 0;
        for (const auto& y : level) c += in_u(y) && (!final_fu || in_fu(y));
        return c;
    }
};

/// Brute enumeration of all eight preimages per level of a quadratic map on
/// P^3 with independent t and u fibers, in long double.
struct QuadraticTree3 {
    using lc = std::complex<long double>;
    using V = std::array<lc, 4>;
    std::array<long double, 3> P, Q, R, R2;
    lc eps1, eps2, center;
    long double rho1, rho2;

    static lc ev(const std::array<long double, 3>& c, lc z, lc w) { return c[0] * w * w + c[1] * z * w + c[2] * z * z; }

    V apply(const V& x) const {
        return {ev(P, x[0], x[1]), ev(Q, x[0], x[1]), x[2] * x[2] + eps1 * ev(R, x[0], x[1]),
                x[3] * x[3] + eps2 * ev(R2, x[0], x[1])};
    }

    bool in_u(const V& x) const {
        const long double m = std::max(std::abs(x[0]), std::abs(x[1]));
        return std::abs(x[2]) < rho1 * m && std::abs(x[3] - center * x[1]) < rho2 * m;
    }

    std::vector<V> pre(const V& x) const {
        const lc a = x[1] * P[2] - x[0] * Q[2], b = x[1] * P[1] - x[0] * Q[1], c = x[1] * P[0] - x[0] * Q[0];
        const lc disc = std::sqrt(b * b - 4.0L * a * c);
        const lc q = -0.5L * (b + (std::real(std::conj(b) * disc) >= 0 ? disc : -disc));
        std::vector<V> out;
        for (lc u : {q / a, c / q}) {
            const lc pu = ev(P, u, 1.0L), qu = ev(Q, u, 1.0L);
            const lc l = std::sqrt(std::abs(pu) > std::abs(qu) ? x[0] / pu : x[1] / qu);
            const lc z = l * u, w = l;
            const lc t = std::sqrt(x[2] - eps1 * ev(R, z, w)), v = std::sqrt(x[3] - eps2 * ev(R2, z, w));
            for (lc st : {t, -t})
                for (lc sv : {v, -v}) out.push_back({z, w, st, sv});
        }
        return out;
    }

    int count(const V& x, int m, bool final_fu) const {
        std::vector<V> level{x};
        for (int n = 0; n < m; ++n) {
            std::vector<V> next;
            for (const auto& y : level)
                for (const auto& z : pre(y)) next.push_back(z);
            level = std::move(next);
        }
        int c = 0;
        for (const auto& y : level) {
            if (!in_u(y)) continue;
            bool ok = !final_fu;
            for (const auto& z : final_fu ? pre(y) : std::vector<V>{})
                if (in_u(z)) ok = true;
            c += ok;
        }
        return c;
    }
};

}  // namespace oracle
