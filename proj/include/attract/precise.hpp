#pragma once

// Double-double arithmetic for backward orbits. Inverting t -> t^d + eps R
// subtracts two nearly equal numbers at every level, so preimage trees more
// than a couple of levels deep lose all fiber accuracy in plain doubles.

#include <cmath>
#include <vector>

#include "attract/pencil_map.hpp"

namespace attract {

struct DD {
    double hi = 0.0, lo = 0.0;
    DD() = default;
    DD(double h) : hi(h) {}  // NOLINT: implicit by design
    DD(double h, double l) : hi(h), lo(l) {}
    double value() const { return hi + lo; }
};

namespace dd_detail {
inline DD two_sum(double a, double b) {
    const double s = a + b, bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}
inline DD quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}
inline DD two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}
}  // namespace dd_detail

inline DD operator+(DD a, DD b) {
    using namespace dd_detail;
    DD s = two_sum(a.hi, b.hi), t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}
inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }
inline DD operator*(DD a, DD b) {
    using namespace dd_detail;
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}
inline DD operator/(DD a, DD b) {
    const double q1 = a.hi / b.hi;
    DD r = a - b * DD(q1);
    const double q2 = r.hi / b.hi;
    r = r - b * DD(q2);
    const double q3 = r.hi / b.hi;
    return dd_detail::quick_two_sum(q1, q2) + DD(q3);
}
inline DD dd_sqrt(DD a) {
    if (a.hi <= 0.0) return DD(0.0);
    const double x = std::sqrt(a.hi);
    return DD(x) + (a - DD(x) * DD(x)) / DD(2.0 * x);
}

struct CDD {
    DD re, im;
    CDD() = default;
    CDD(DD r, DD i) : re(r), im(i) {}
    CDD(cplx c) : re(c.real()), im(c.imag()) {}  // NOLINT: implicit by design
    cplx value() const { return {re.value(), im.value()}; }
};

inline CDD operator+(const CDD& a, const CDD& b) { return {a.re + b.re, a.im + b.im}; }
inline CDD operator-(const CDD& a, const CDD& b) { return {a.re - b.re, a.im - b.im}; }
inline CDD operator*(const CDD& a, const CDD& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline DD norm(const CDD& a) { return a.re * a.re + a.im * a.im; }
inline CDD operator/(const CDD& a, const CDD& b) {
    const DD n = norm(b);
    const CDD c{b.re, -b.im};
    const CDD p = a * c;
    return {p.re / n, p.im / n};
}
inline double abs(const CDD& a) { return std::abs(a.value()); }

/// A lift carried in double-double.
struct PreciseLift {
    CDD z, w, t;
    P2 point() const { return P2({z.value(), w.value(), t.value()}); }
};

struct PrecisePreimage {
    PreciseLift lift;
    int multiplicity;
};

/// Homogeneous evaluation of a form at (z, w) in double-double.
CDD eval_dd(const BinaryForm& f, const CDD& z, const CDD& w);

/// Principal-branch d-th root of c, polished by Newton in double-double.
CDD root_dd(const CDD& c, int d);

struct PreciseBase {
    CDD z, w;  // lift with s (P, Q)(z, w) equal to the target
    int multiplicity;
};

struct PreciseFiber {
    CDD t;
    int multiplicity;
};

/// Base roots of s (P, Q)(z, w) = (zt, wt), polished and lifted.
std::vector<PreciseBase> precise_base_preimages(const PencilEndo& f, const CDD& zt, const CDD& wt);

/// Roots of t^d = tt / s - eps R(z, w) over a lifted base point.
std::vector<PreciseFiber> precise_fiber_roots(const PencilEndo& f, const CDD& z, const CDD& w, const CDD& tt);

/// Preimages of the lift (z, w, t) with lifts satisfying F(y) = (z, w, t) to
/// double-double accuracy. Base roots come from the double solver and are
/// polished; repeated base roots are kept at double accuracy.
std::vector<PrecisePreimage> precise_preimages(const PencilEndo& f, const PreciseLift& x);

inline PreciseLift precise_lift(const P2& x) { return {x[0], x[1], x[2]}; }

/// Forward image of a lift, rescaled by a power of two so the largest
/// coordinate stays near 1. The rescaling is exact.
PreciseLift precise_apply(const PencilEndo& f, const PreciseLift& x);
PreciseLift precise_iterate(const PencilEndo& f, PreciseLift x, int n);

}  // namespace attract
