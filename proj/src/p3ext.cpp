#include "attract/p3ext.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "attract/special_sets.hpp"

namespace attract {

namespace {

BinaryForm fixed_P() { return BinaryForm({0.1, 0.0, 1.0}); }  // z^2 + 0.1 w^2
BinaryForm fixed_Q() { return BinaryForm({1.0, 0.0, 0.0}); }  // w^2
BinaryForm fixed_R() { return BinaryForm({0.0, 1.0, 1.0}); }  // z^2 + zw

CDD power(const CDD& a, int n) {
    CDD r(cplx(1.0));
    for (int i = 0; i < n; ++i) r = r * a;
    return r;
}

struct Lift4 {
    CDD z, w, t, u;
    P3 point() const { return P3({z.value(), w.value(), t.value(), u.value()}); }
};

Lift4 lift4(const P3& x) { return {x[0], x[1], x[2], x[3]}; }

Lift4 apply_dd(const P3Endo& f, const Lift4& x) {
    const int d = f.degree();
    const CDD p = eval_dd(f.first.P(), x.z, x.w), q = eval_dd(f.first.Q(), x.z, x.w);
    Lift4 y{p, q, power(x.t, d) + CDD(f.first.epsilon()) * eval_dd(f.first.R(), x.z, x.w),
            power(x.u, d) + CDD(f.second.epsilon()) * eval_dd(f.second.R(), x.z, x.w)};
    const double m = std::max({abs(y.z), abs(y.w), abs(y.t), abs(y.u)});
    if (m > 0.0 && std::isfinite(m)) {
        // Power-of-two rescaling is exact.
        const CDD k(cplx(std::ldexp(1.0, -std::ilogb(m))));
        y = {y.z * k, y.w * k, y.t * k, y.u * k};
    }
    return y;
}

double base_max(const CDD& z, const CDD& w) { return std::max(abs(z), abs(w)); }

bool in_U1(const P3Region& r, const CDD& z, const CDD& w, const CDD& t) { return abs(t) < r.rho1 * base_max(z, w); }

bool in_U2(const P3Endo& f, const P3Region& r, const CDD& z, const CDD& w, const CDD& u) {
    return abs(u - CDD(f.u_center) * w) < r.rho2 * base_max(z, w);
}

double ratio(cplx z, cplx w) { return w == cplx(0.0) ? std::numeric_limits<double>::infinity() : std::abs(z / w); }

void check_box(const Box& b) {
    if (!(b.inner > 0.0 && b.inner < 1.0 && b.outer > 1.0 && b.rho > 0.0))
        throw Error(ErrorKind::ConfigInvalid, "box needs 0 < inner < 1 < outer and rho > 0");
}

// Point of the closed box with |z/w| = r, arg theta, fiber fraction s of rho.
P2 box_point(const Box& b, double r, double theta, cplx s) {
    const cplx z = std::polar(r, theta);
    return P2({z, 1.0, s * b.rho * std::max(r, 1.0)});
}

}  // namespace

P3Endo make_invariant_hyperplane(const BinaryForm& P, const BinaryForm& Q, const BinaryForm& R, cplx eps1, cplx eps2) {
    const int d = P.degree();
    if (Q.degree() != d || R.degree() != d) throw Error(ErrorKind::ConfigInvalid, "forms must share one degree");
    // u^d + eps2 (Q - eps2^{d-1} w^d) = u^d + eps2 Q - eps2^d w^d.
    const BinaryForm R2 = Q - BinaryForm::monomial(d, 0, std::pow(eps2, d - 1));
    P3Endo f{P3Variant::InvariantHyperplane, PencilEndo(P, Q, R, eps1), PencilEndo(P, Q, R2, eps2), eps1, eps2, eps2};
    return f;
}

P3Endo build_invariant_hyperplane(const BinaryForm& P, const BinaryForm& Q, const BinaryForm& R, cplx eps1, cplx eps2) {
    P3Endo f = make_invariant_hyperplane(P, Q, R, eps1, eps2);
    std::string failed;
    const SpecialSets sets = assemble_sets(f.first);
    const ConditionVerdict v = check_conditions(sets, f.first);
    if (sets.degenerate) failed += " degenerate-sets";
    if (!v.cond1_disjoint) failed += " cond1";
    if (!v.cond2_chain) failed += " cond2";
    if (!check_fixed_point_condition(P, Q)) failed += " fixed-point";
    if (!failed.empty()) throw Error(ErrorKind::PrerequisiteFailed, "failed:" + failed);
    return f;
}

P3Endo build_product_type(cplx eps1, cplx eps2) {
    return {P3Variant::ProductType, PencilEndo(fixed_P(), fixed_Q(), fixed_R(), eps1),
            PencilEndo(fixed_P(), fixed_Q(), fixed_R(), eps2), eps1, eps2, 0.0};
}

P3 apply3(const P3Endo& f, const P3& x) { return apply_dd(f, lift4(x)).point(); }

P2 project_first(const P3& x) { return P2({x[0], x[1], x[2]}); }
P2 project_second(const P3& x) { return P2({x[0], x[1], x[3]}); }

bool check_fixed_point_condition(const BinaryForm& P, const BinaryForm& Q, int n_max, double tol) {
    const P1 e = make_p1(1.0, 0.0);
    P1 p = e;
    for (int i = 1; i <= n_max; ++i) {
        p = P1({P(p), Q(p)});
        if (chordal(p, e) <= tol) return false;
    }
    return true;
}

bool in_U3(const P3Endo& f, const P3Region& r, const P3& x) {
    const Lift4 y = lift4(x);
    return in_U1(r, y.z, y.w, y.t) && in_U2(f, r, y.z, y.w, y.u);
}

P3 sample_U3(const P3Endo& f, const P3Region& r, Rng& rng) {
    const P1 b = rng.p1();
    const double m = b.base_max();
    return P3({b[0], b[1], rng.disc(r.rho1 * m), f.u_center * b[1] + rng.disc(r.rho2 * m)});
}

P3Region p3_region(const P3Endo& f, double c) {
    const SphereExtrema ex = sphere_extrema(f.first.P(), f.first.Q(), f.first.R());
    P3Region r;
    r.rho1 = trapping_constants(f.first, ex).rho;
    if (f.variant == P3Variant::InvariantHyperplane) {
        r.rho2 = c * std::abs(f.eps2);
    } else {
        r.rho2 = trapping_constants(f.second, sphere_extrema(f.second.P(), f.second.Q(), f.second.R())).rho;
    }
    return r;
}

P3Trapping certify_p3_trapping(const P3Endo& f, const P3Region& r, int samples, std::uint64_t seed) {
    const int d = f.degree();
    const SphereExtrema ex = sphere_extrema(f.first.P(), f.first.Q(), f.first.R());
    P3Trapping t;
    t.slack1 = r.rho1 - (std::pow(r.rho1, d) + std::abs(f.eps1) * ex.beta_hi) / ex.alpha_lo;
    if (f.variant == P3Variant::InvariantHyperplane) {
        // |u^d - (eps2 w)^d| <= ((|eps2| + rho2)^d - |eps2|^d) M^d when |u - eps2 w| < rho2 M.
        const double e = std::abs(f.eps2);
        t.slack2 = r.rho2 - (std::pow(e + r.rho2, d) - std::pow(e, d)) / ex.alpha_lo;
    } else {
        const SphereExtrema ex2 = sphere_extrema(f.second.P(), f.second.Q(), f.second.R());
        t.slack2 = r.rho2 - (std::pow(r.rho2, d) + std::abs(f.eps2) * ex2.beta_hi) / ex2.alpha_lo;
    }
    Rng rng(seed);
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        const P1 b = rng.p1();
        const double m = b.base_max();
        // Odd samples hug both fiber boundaries.
        const double s1 = (i % 2 == 0) ? std::sqrt(rng.uniform()) : 1.0 - 1e-3 * rng.uniform();
        const double s2 = (i % 2 == 0) ? std::sqrt(rng.uniform()) : 1.0 - 1e-3 * rng.uniform();
        const cplx t0 = std::polar(s1 * r.rho1 * m, 2.0 * kPi * rng.uniform());
        const cplx u0 = f.u_center * b[1] + std::polar(s2 * r.rho2 * m, 2.0 * kPi * rng.uniform());
        const Lift4 y = apply_dd(f, {b[0], b[1], t0, u0});
        const double my = base_max(y.z, y.w);
        worst1 = std::max(worst1, abs(y.t) / (r.rho1 * my));
        worst2 = std::max(worst2, abs(y.u - CDD(f.u_center) * y.w) / (r.rho2 * my));
    }
    t.samples = samples;
    t.sampled_delta1 = 1.0 - worst1;
    t.sampled_delta2 = 1.0 - worst2;
    return t;
}

namespace {

struct FiberValue {
    CDD v;
    int mult;
    unsigned mask = 0;  // next-level base preimages carrying a root in the region
};

struct BaseNode {
    CDD z, w;
    int mult;
    std::vector<FiberValue> ts, us;
};

// Backward ladder on a precise lift. Each base node keeps the fiber values of
// both coordinates over it; the two fibers only interact through the shared
// base lift, so the tree holds d^m (|ts| + |us|) values instead of d^{3m}.
PreimageCount fiberwise_count(const P3Endo& f, const P3Region& r, const Lift4& x, int m, Region region) {
    const bool prune = region != Region::All;
    std::vector<BaseNode> level{{x.z, x.w, 1, {{x.t, 1}}, {{x.u, 1}}}};
    for (int n = 0; n < m; ++n) {
        std::vector<BaseNode> next;
        for (const auto& node : level) {
            for (const auto& b : precise_base_preimages(f.first, node.z, node.w)) {
                BaseNode child{b.z, b.w, node.mult * b.multiplicity, {}, {}};
                for (const auto& tv : node.ts)
                    for (const auto& root : precise_fiber_roots(f.first, b.z, b.w, tv.v))
                        if (!prune || in_U1(r, b.z, b.w, root.t)) child.ts.push_back({root.t, tv.mult * root.multiplicity});
                for (const auto& uv : node.us)
                    for (const auto& root : precise_fiber_roots(f.second, b.z, b.w, uv.v))
                        if (!prune || in_U2(f, r, b.z, b.w, root.t)) child.us.push_back({root.t, uv.mult * root.multiplicity});
                if (!child.ts.empty() && !child.us.empty()) next.push_back(std::move(child));
            }
        }
        level = std::move(next);
    }

    PreimageCount c;
    for (auto& node : level) {
        if (region != Region::FU) {
            long tw = 0, uw = 0;
            for (const auto& tv : node.ts) tw += tv.mult;
            for (const auto& uv : node.us) uw += uv.mult;
            c.weighted += static_cast<int>(node.mult * tw * uw);
            c.distinct += static_cast<int>(node.ts.size() * node.us.size());
            continue;
        }
        // y = (node, t, u) lies in f(U) iff some base preimage of the node
        // carries both a t-root in U1 and a u-root in U2.
        const auto bases = precise_base_preimages(f.first, node.z, node.w);
        if (bases.size() > 32) throw Error(ErrorKind::ConfigInvalid, "degree too large for the preimage mask");
        for (auto& tv : node.ts)
            for (std::size_t k = 0; k < bases.size(); ++k)
                for (const auto& root : precise_fiber_roots(f.first, bases[k].z, bases[k].w, tv.v))
                    if (in_U1(r, bases[k].z, bases[k].w, root.t)) tv.mask |= 1u << k;
        for (auto& uv : node.us)
            for (std::size_t k = 0; k < bases.size(); ++k)
                for (const auto& root : precise_fiber_roots(f.second, bases[k].z, bases[k].w, uv.v))
                    if (in_U2(f, r, bases[k].z, bases[k].w, root.t)) uv.mask |= 1u << k;
        std::map<unsigned, std::pair<long, int>> thist, uhist;  // mask -> (weight, distinct)
        for (const auto& tv : node.ts) {
            auto& h = thist[tv.mask];
            h.first += tv.mult;
            ++h.second;
        }
        for (const auto& uv : node.us) {
            auto& h = uhist[uv.mask];
            h.first += uv.mult;
            ++h.second;
        }
        for (const auto& [mt, ht] : thist)
            for (const auto& [mu, hu] : uhist)
                if (mt & mu) {
                    c.weighted += static_cast<int>(node.mult * ht.first * hu.first);
                    c.distinct += ht.second * hu.second;
                }
    }
    return c;
}

}  // namespace

PreimageCount count_p3_preimages(const P3Endo& f, const P3Region& r, const P3& x, int m, Region region) {
    if (m < 0) throw Error(ErrorKind::ConfigInvalid, "negative iterate");
    // The ladder stores d^m base nodes with up to d^m values per fiber.
    if (std::pow(static_cast<double>(f.degree()), 2 * m) > 1e7)
        throw Error(ErrorKind::BudgetExceeded, "fiberwise tree exceeds the budget");
    return fiberwise_count(f, r, lift4(x), m, region);
}

DegreeCertificate certify_p3_degree(const P3Endo& f, const P3Region& r, int m, int samples, std::uint64_t seed) {
    if (std::pow(static_cast<double>(f.degree()), 2 * m) > 1e7)
        throw Error(ErrorKind::BudgetExceeded, "fiberwise tree exceeds the budget");
    DegreeCertificate c;
    const int d = f.degree();
    c.iterate_m = m;
    c.threshold = static_cast<int>(std::lround(std::pow(d, m)));
    Rng rng(seed);
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        Lift4 x = lift4(sample_U3(f, r, rng));
        for (int k = 0; k <= m; ++k) x = apply_dd(f, x);
        const PreimageCount full = fiberwise_count(f, r, x, m, Region::FU);
        const PreimageCount one = fiberwise_count(f, r, x, 1, Region::U);
        if (i == 0 || full.weighted > c.max_count) {
            c.max_count = std::max(c.max_count, full.weighted);
            c.worst_point = project_first(x.point());
        }
        c.min_count = i == 0 ? full.weighted : std::min(c.min_count, full.weighted);
        c.max_distinct = std::max(c.max_distinct, full.distinct);
        c.dt_one_step = std::max(c.dt_one_step, one.weighted);
        total += full.weighted;
    }
    // The ladder already prunes every level, so both counts coincide.
    c.max_count_pruned = c.max_count;
    c.samples = samples;
    c.mean_count = samples > 0 ? total / samples : 0.0;
    c.verdict = samples > 0 && c.max_count < c.threshold;
    return c;
}

double hyperplane_residual(const P3Endo& f, int samples, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const cplx z = rng.complex_normal(), w = rng.complex_normal(), t = rng.complex_normal();
        const P3 y = apply3(f, P3({z, w, t, f.eps2 * w}));
        worst = std::max(worst, std::abs(y[3] - f.eps2 * y[1]));
    }
    return worst;
}

bool in_box(const Box& b, const P2& x) {
    const double r = ratio(x[0], x[1]);
    return r > b.inner && r < b.outer && std::abs(x[2]) < b.rho * x.base_max();
}

HorizontalLikeReport horizontal_like_check(const PencilEndo& f, const Box& box, int boundary_samples,
                                           int injectivity_samples, std::uint64_t seed) {
    check_box(box);
    HorizontalLikeReport rep;
    Rng rng(seed);
    const auto fiber_frac = [&](const P2& y) { return std::abs(y[2]) / (box.rho * y.base_max()); };

    // f(d_v B) misses B: each image leaves W or leaves the fiber disc.
    rep.vertical_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < boundary_samples; ++i) {
        const double r = (i % 2 == 0) ? box.inner : box.outer;
        const P2 x = box_point(box, r, 2.0 * kPi * rng.uniform(), rng.disc(1.0));
        const P2 y = apply(f, x);
        const double ry = ratio(y[0], y[1]);
        const double margin = std::max({box.inner - ry, ry - box.outer, fiber_frac(y) - 1.0});
        if (margin < rep.vertical_margin) {
            rep.vertical_margin = margin;
            rep.vertical_witness = x;
        }
    }
    rep.vertical_ok = rep.vertical_margin > 0.0;

    // f(closure B) meets d B only in d_v B: images over closure W stay strictly
    // inside the fiber disc. Half the samples lie on d_h B.
    rep.horizontal_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < boundary_samples; ++i) {
        const double r = rng.uniform(box.inner, box.outer);
        const cplx s = (i % 2 == 0) ? std::polar(1.0, 2.0 * kPi * rng.uniform()) : rng.disc(1.0);
        const P2 x = box_point(box, r, 2.0 * kPi * rng.uniform(), s);
        const P2 y = apply(f, x);
        const double ry = ratio(y[0], y[1]);
        if (ry < box.inner || ry > box.outer) continue;
        const double margin = 1.0 - fiber_frac(y);
        if (margin < rep.horizontal_margin) {
            rep.horizontal_margin = margin;
            rep.horizontal_witness = x;
        }
    }
    if (!std::isfinite(rep.horizontal_margin)) rep.horizontal_margin = 1.0;
    rep.horizontal_ok = rep.horizontal_margin > 0.0;
    rep.boundary_samples = boundary_samples;

    // f_inf^-1(closure W) inside W.
    rep.base_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < boundary_samples; ++i) {
        const double r = (i % 4 == 0) ? box.inner : (i % 4 == 1) ? box.outer : rng.uniform(box.inner, box.outer);
        const P1 p = make_p1(std::polar(r, 2.0 * kPi * rng.uniform()), 1.0);
        for (const auto& nl : base_preimages(f, p)) {
            const double rp = ratio(nl.base[0], nl.base[1]);
            rep.base_margin = std::min(rep.base_margin, std::min(rp - box.inner, box.outer - rp));
        }
    }
    rep.base_ok = rep.base_margin > 0.0;

    // Injectivity on f(B): a point of f^2(B) has how many preimages in f(B)?
    rep.min_preimages = std::numeric_limits<int>::max();
    for (int i = 0; i < injectivity_samples; ++i) {
        const P2 y0 = box_point(box, rng.uniform(box.inner, box.outer), 2.0 * kPi * rng.uniform(), rng.disc(1.0));
        const PreciseLift x = precise_iterate(f, precise_lift(y0), 2);
        int count = 0;
        for (const auto& y : precise_preimages(f, x)) {
            const auto pre = precise_preimages(f, y.lift);
            if (std::any_of(pre.begin(), pre.end(), [&](const PrecisePreimage& q) { return in_box(box, q.lift.point()); }))
                count += y.multiplicity;
        }
        rep.max_preimages = std::max(rep.max_preimages, count);
        rep.min_preimages = std::min(rep.min_preimages, count);
    }
    if (injectivity_samples == 0) rep.min_preimages = 0;
    rep.injectivity_samples = injectivity_samples;
    return rep;
}

std::vector<double> scale_ladder(double hi, double lo, int count) {
    if (!(hi > lo && lo > 0.0) || count < 2) throw Error(ErrorKind::ConfigInvalid, "scale ladder needs hi > lo > 0");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(hi * std::pow(lo / hi, static_cast<double>(i) / (count - 1)));
    return out;
}

BoxCounting box_counting_dim(const std::vector<std::array<double, 2>>& cloud, const std::vector<double>& scales) {
    if (cloud.size() < 10000) throw Error(ErrorKind::InsufficientData, "box counting needs at least 1e4 points");
    if (scales.size() < 2) throw Error(ErrorKind::InsufficientData, "box counting needs at least two scales");
    const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
    if (!(*lo > 0.0) || std::log10(*hi / *lo) < 1.5)
        throw Error(ErrorKind::InsufficientData, "scales must span at least 1.5 decades");

    BoxCounting out;
    std::vector<double> xs, ys;
    for (const double delta : scales) {
        std::set<std::pair<std::int64_t, std::int64_t>> cells;
        for (const auto& p : cloud)
            cells.emplace(static_cast<std::int64_t>(std::floor(p[0] / delta)),
                          static_cast<std::int64_t>(std::floor(p[1] / delta)));
        out.counts.emplace_back(delta, static_cast<int>(cells.size()));
        xs.push_back(std::log(1.0 / delta));
        ys.push_back(std::log(static_cast<double>(cells.size())));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (out.intercept + out.slope * xs[i]);
        ss += e * e;
    }
    out.residual_rms = std::sqrt(ss / n);
    return out;
}

std::vector<std::array<double, 2>> fiber_chart_cloud(const P1& p, const std::vector<P2>& points) {
    std::vector<std::array<double, 2>> out;
    out.reserve(points.size());
    for (const auto& x : points) {
        const cplx s = fiber_coordinate(p, x);
        out.push_back({s.real(), s.imag()});
    }
    return out;
}

}  // namespace attract
