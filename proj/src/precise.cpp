#include "attract/precise.hpp"

#include <algorithm>

namespace attract {

namespace {

CDD power(const CDD& a, int n) {
    CDD r(cplx(1.0));
    for (int i = 0; i < n; ++i) r = r * a;
    return r;
}

constexpr double kDDTol = 1e-30;
constexpr int kMaxPolish = 8;

// Newton polish of a guess for x^d = c.
CDD polish_root(CDD r, const CDD& c, int d) {
    for (int it = 0; it < kMaxPolish; ++it) {
        const CDD rd1 = power(r, d - 1);
        const CDD step = (rd1 * r - c) / (CDD(cplx(static_cast<double>(d))) * rd1);
        r = r - step;
        if (abs(step) <= kDDTol * abs(r)) break;
    }
    return r;
}

CDD unity_dd(int k, int d) {
    if (k % d == 0) return CDD(cplx(1.0));
    return polish_root(CDD(root_of_unity(k, d)), CDD(cplx(1.0)), d);
}

}  // namespace

CDD eval_dd(const BinaryForm& f, const CDD& z, const CDD& w) {
    const int d = f.degree();
    std::vector<CDD> zp(static_cast<std::size_t>(d) + 1), wp(static_cast<std::size_t>(d) + 1);
    zp[0] = CDD(cplx(1.0));
    wp[0] = CDD(cplx(1.0));
    for (int j = 1; j <= d; ++j) {
        zp[static_cast<std::size_t>(j)] = zp[static_cast<std::size_t>(j) - 1] * z;
        wp[static_cast<std::size_t>(j)] = wp[static_cast<std::size_t>(j) - 1] * w;
    }
    CDD acc(cplx(0.0));
    for (int j = 0; j <= d; ++j)
        if (f.coeff(j) != cplx(0.0))
            acc = acc + CDD(f.coeff(j)) * zp[static_cast<std::size_t>(j)] * wp[static_cast<std::size_t>(d - j)];
    return acc;
}

CDD root_dd(const CDD& c, int d) {
    const cplx v = c.value();
    if (v == cplx(0.0)) return CDD(cplx(0.0));
    return polish_root(CDD(principal_root(v, d)), c, d);
}

std::vector<PreciseBase> precise_base_preimages(const PencilEndo& f, const CDD& zt, const CDD& wt) {
    const int d = f.degree();
    const CDD s(f.lift_scale());
    const BinaryForm pz = f.P().dz(), pw = f.P().dw(), qz = f.Q().dz(), qw = f.Q().dw();
    std::vector<PreciseBase> out;
    for (const auto& nl : base_preimages_of_lift(f, zt.value(), wt.value())) {
        CDD bz(nl.base[0]), bw(nl.base[1]);
        if (nl.multiplicity == 1) {
            // Newton on W P - Z Q along the affine chart through the base point.
            const bool chart_w = std::abs(nl.base[0]) <= std::abs(nl.base[1]);
            CDD u = chart_w ? bz / bw : bw / bz;
            for (int it = 0; it < kMaxPolish; ++it) {
                const CDD a = chart_w ? u : CDD(cplx(1.0)), b = chart_w ? CDD(cplx(1.0)) : u;
                const CDD g = wt * eval_dd(f.P(), a, b) - zt * eval_dd(f.Q(), a, b);
                const CDD dg = chart_w ? wt * eval_dd(pz, a, b) - zt * eval_dd(qz, a, b)
                                       : wt * eval_dd(pw, a, b) - zt * eval_dd(qw, a, b);
                if (dg.value() == cplx(0.0)) break;
                const CDD step = g / dg;
                u = u - step;
                if (abs(step) <= kDDTol * std::max(1.0, abs(u))) break;
            }
            bz = chart_w ? u : CDD(cplx(1.0));
            bw = chart_w ? CDD(cplx(1.0)) : u;
        }
        const CDD vp = eval_dd(f.P(), bz, bw), vq = eval_dd(f.Q(), bz, bw);
        const CDD ld = abs(vp) >= abs(vq) ? zt / (s * vp) : wt / (s * vq);
        const CDD lambda = root_dd(ld, d);
        out.push_back({lambda * bz, lambda * bw, nl.multiplicity});
    }
    return out;
}

std::vector<PreciseFiber> precise_fiber_roots(const PencilEndo& f, const CDD& z, const CDD& w, const CDD& tt) {
    const int d = f.degree();
    const CDD er = CDD(f.epsilon()) * eval_dd(f.R(), z, w);
    const CDD ts = tt / CDD(f.lift_scale());
    const CDD c = ts - er;
    if (abs(c) <= 1e-30 * std::max(abs(ts), abs(er))) return {{CDD(cplx(0.0)), d}};
    const CDD root = root_dd(c, d);
    std::vector<PreciseFiber> out;
    for (int k = 0; k < d; ++k) out.push_back({root * unity_dd(k, d), 1});
    return out;
}

std::vector<PrecisePreimage> precise_preimages(const PencilEndo& f, const PreciseLift& x) {
    const int d = f.degree();
    std::vector<PrecisePreimage> out;
    if (x.z.value() == cplx(0.0) && x.w.value() == cplx(0.0)) {
        const CDD t = root_dd(x.t / CDD(f.lift_scale()), d);
        out.push_back({{CDD(cplx(0.0)), CDD(cplx(0.0)), t}, d * d});
        return out;
    }
    for (const auto& b : precise_base_preimages(f, x.z, x.w))
        for (const auto& r : precise_fiber_roots(f, b.z, b.w, x.t))
            out.push_back({{b.z, b.w, r.t}, b.multiplicity * r.multiplicity});
    return out;
}

PreciseLift precise_apply(const PencilEndo& f, const PreciseLift& x) {
    const CDD s(f.lift_scale()), eps(f.epsilon());
    PreciseLift y{s * eval_dd(f.P(), x.z, x.w), s * eval_dd(f.Q(), x.z, x.w),
                  s * (power(x.t, f.degree()) + eps * eval_dd(f.R(), x.z, x.w))};
    const double m = std::max({abs(y.z), abs(y.w), abs(y.t)});
    if (m > 0.0 && std::isfinite(m)) {
        const CDD k(cplx(std::ldexp(1.0, -std::ilogb(m))));
        y = {y.z * k, y.w * k, y.t * k};
    }
    return y;
}

PreciseLift precise_iterate(const PencilEndo& f, PreciseLift x, int n) {
    for (int i = 0; i < n; ++i) x = precise_apply(f, x);
    return x;
}

}  // namespace attract
