#include <cmath>

#include "attract/pencil_map.hpp"

namespace attract {

PencilEndo::PencilEndo(BinaryForm p, BinaryForm q, BinaryForm r, cplx epsilon, PrecisionProfile prec)
    : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), eps_(epsilon), prec_(prec) {
    const int d = p_.degree();
    if (d < 2 || q_.degree() != d || r_.degree() != d)
        throw Error(ErrorKind::ConfigInvalid, "P, Q, R must share a degree d >= 2");
    if (!is_finite(eps_)) throw Error(ErrorKind::ConfigInvalid, "epsilon is not finite");
    if (relative_resultant(p_, q_) <= prec_.degenerate_tol)
        throw Error(ErrorKind::DegenerateFamily, "P and Q share a root (resultant vanishes)");
}

PencilEndo PencilEndo::with_epsilon(cplx eps) const {
    PencilEndo g = *this;
    g.eps_ = eps;
    return g;
}

PencilEndo PencilEndo::with_lift_scale(cplx lambda) const {
    PencilEndo g = *this;
    g.lift_scale_ = lambda;
    return g;
}

PencilEndo PencilEndo::with_precision(const PrecisionProfile& prec) const {
    PencilEndo g = *this;
    g.prec_ = prec;
    return g;
}

std::array<cplx, 3> PencilEndo::lift_apply(cplx z, cplx w, cplx t) const {
    return {lift_scale_ * p_(z, w), lift_scale_ * q_(z, w), lift_scale_ * (std::pow(t, degree()) + eps_ * r_(z, w))};
}

P2 apply(const PencilEndo& f, const P2& x) {
    const auto y = f.lift_apply(x[0], x[1], x[2]);
    return P2({y[0], y[1], y[2]});
}

P1 base_apply(const PencilEndo& f, const P1& p) { return P1({f.P()(p), f.Q()(p)}); }

P2 base_apply_aug(const PencilEndo& f, const P1& p) { return P2({f.P()(p), f.Q()(p), f.R()(p)}); }

P1 base_iterate(const PencilEndo& f, P1 p, int n) {
    for (int i = 0; i < n; ++i) p = base_apply(f, p);
    return p;
}

std::vector<NormalizedFiberLift> base_preimages_of_lift(const PencilEndo& f, cplx tz, cplx tw) {
    const BinaryForm eq = f.P().scaled(tw) - f.Q().scaled(tz);
    const RootSet rs = roots(BinaryForm(eq.coeffs()), f.precision());
    const int d = f.degree();
    std::vector<NormalizedFiberLift> out;
    out.reserve(rs.size());
    for (const auto& r : rs) {
        const cplx pz = r.point[0], pw = r.point[1];
        const cplx vp = f.P()(pz, pw), vq = f.Q()(pz, pw);
        const cplx ld = std::abs(vp) >= std::abs(vq) ? tz / vp : tw / vq;
        const cplx lambda = principal_root(ld / f.lift_scale(), d);
        out.push_back({r.point, lambda * pz, lambda * pw, tz, tw, r.multiplicity});
    }
    return out;
}

std::vector<NormalizedFiberLift> base_preimages(const PencilEndo& f, const P1& q) {
    return base_preimages_of_lift(f, q[0], q[1]);
}

PreimageResult preimages_of_lift(const PencilEndo& f, cplx z, cplx w, cplx t) {
    const int d = f.degree();
    PreimageResult res;
    if (z == cplx(0.0) && w == cplx(0.0)) {
        // P and Q vanish together only at the origin, so the center is its own
        // unique preimage.
        res.center_fiber = true;
        res.points.push_back({P2({0.0, 0.0, 1.0}), d * d, 0.0, 0.0, principal_root(t / f.lift_scale(), d)});
        return res;
    }
    const cplx tt = t / f.lift_scale();
    for (const auto& nl : base_preimages_of_lift(f, z, w)) {
        const cplx er = f.epsilon() * f.R()(nl.z, nl.w);
        const cplx c = tt - er;
        const double scale = std::max(std::abs(tt), std::abs(er));
        if (std::abs(c) <= 1e-14 * scale || c == cplx(0.0)) {
            res.points.push_back({P2({nl.z, nl.w, 0.0}), nl.multiplicity * d, nl.z, nl.w, 0.0});
            continue;
        }
        const cplx root = principal_root(c, d);
        for (int k = 0; k < d; ++k) {
            const cplx tk = root * root_of_unity(k, d);
            res.points.push_back({P2({nl.z, nl.w, tk}), nl.multiplicity, nl.z, nl.w, tk});
        }
    }
    return res;
}

PreimageResult preimages(const PencilEndo& f, const P2& x) { return preimages_of_lift(f, x[0], x[1], x[2]); }

double green_correction(const PencilEndo& f, const P2& x) {
    const auto y = f.lift_apply(x[0], x[1], x[2]);
    double m = 0.0;
    for (auto c : y) m = std::max(m, std::abs(c));
    double s = 0.0;
    for (auto c : y) s += std::norm(c / m);
    return std::log(m) + 0.5 * std::log(s);
}

P2 iterate(const PencilEndo& f, P2 x, int n) {
    for (int i = 0; i < n; ++i) x = apply(f, x);
    return x;
}

}  // namespace attract
