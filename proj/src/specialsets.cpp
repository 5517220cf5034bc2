#include <algorithm>
#include <cmath>
#include <limits>

#include "attract/special_sets.hpp"

namespace attract {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Kind { Augmented, Twisted };

// One pair system: E1 = P(p)Q(q) - Q(p)P(q) divided by the diagonal factor,
// together with a second equation built on P or, where P vanishes, on Q.
struct System {
    Kind kind;
    bool q_based;
    int k;  // twist index, 0 for the augmented system
};

BinaryForm first_equation(const PencilEndo& f, cplx pz, cplx pw) {
    const BinaryForm e = f.Q().scaled(f.P()(pz, pw)) - f.P().scaled(f.Q()(pz, pw));
    return e.divide_linear(-pw, pz);
}

BinaryForm second_equation(const PencilEndo& f, const System& s, cplx pz, cplx pw) {
    const BinaryForm& base = s.q_based ? f.Q() : f.P();
    const cplx bp = base(pz, pw), rp = f.R()(pz, pw);
    if (s.kind == Kind::Augmented) return (f.R().scaled(bp) - base.scaled(rp)).divide_linear(-pw, pz);
    const cplx omega = root_of_unity(s.k, f.degree());
    return f.R().scaled(omega * bp) - base.scaled(rp);
}

// Projective residual of the pair condition; zero iff (p, q) solves it.
double pair_residual(const PencilEndo& f, const P1& p, const P1& q, int k) {
    const cplx omega = k == 0 ? cplx(1.0) : root_of_unity(k, f.degree());
    const std::array<cplx, 3> vp{f.P()(p), f.Q()(p), f.R()(p)};
    const std::array<cplx, 3> vq{f.P()(q), f.Q()(q), omega * f.R()(q)};
    return chordal_lift(vp, vq);
}

P1 chart_point(int chart, cplx x) { return chart == 0 ? make_p1(x, 1.0) : make_p1(1.0, x); }

int chart_of(const P1& p, cplx& x) {
    if (std::abs(p[0]) <= std::abs(p[1])) {
        x = p[0] / p[1];
        return 0;
    }
    x = p[1] / p[0];
    return 1;
}

// Newton on (x_p, x_q) with a forward-difference Jacobian. Returns the size of
// the Newton step at the final point, an estimate of its distance to the
// solution; it stays large when iterates creep toward a singular point.
double polish_pair(const PencilEndo& f, const System& s, P1& p, P1& q) {
    cplx xp, xq;
    const int cp = chart_of(p, xp), cq = chart_of(q, xq);
    auto residuals = [&](cplx a, cplx b, cplx& r1, cplx& r2) {
        const P1 pp = chart_point(cp, a), qq = chart_point(cq, b);
        r1 = first_equation(f, pp[0], pp[1])(qq);
        r2 = second_equation(f, s, pp[0], pp[1])(qq);
    };
    auto newton_step = [&](cplx a, cplx b, cplx& da, cplx& db) {
        cplx f1, f2, a1, a2, b1, b2;
        residuals(a, b, f1, f2);
        const cplx ha = 1e-7 * (1.0 + std::abs(a)), hb = 1e-7 * (1.0 + std::abs(b));
        residuals(a + ha, b, a1, a2);
        residuals(a, b + hb, b1, b2);
        const cplx j11 = (a1 - f1) / ha, j21 = (a2 - f2) / ha, j12 = (b1 - f1) / hb, j22 = (b2 - f2) / hb;
        const cplx det = j11 * j22 - j12 * j21;
        if (det == cplx(0.0) || !is_finite(det)) return false;
        da = (f1 * j22 - f2 * j12) / det;
        db = (j11 * f2 - j21 * f1) / det;
        return is_finite(da) && is_finite(db);
    };
    double best = pair_residual(f, p, q, s.k);
    cplx bp = xp, bq = xq;
    for (int it = 0; it < 40; ++it) {
        cplx dp, dq;
        if (!newton_step(xp, xq, dp, dq)) break;
        xp -= dp;
        xq -= dq;
        const P1 pp = chart_point(cp, xp), qq = chart_point(cq, xq);
        const double res = pair_residual(f, pp, qq, s.k);
        if (res < best) {
            best = res;
            p = pp;
            q = qq;
            bp = xp;
            bq = xq;
        } else if (it > 2) {
            break;
        }
        if (std::abs(dp) + std::abs(dq) < 1e-15 * (1.0 + std::abs(xp) + std::abs(xq))) break;
    }
    cplx dp, dq;
    if (!newton_step(bp, bq, dp, dq)) return kInf;
    return std::abs(dp) + std::abs(dq);
}

struct Eliminant {
    std::vector<cplx> coeffs;  // trimmed; coefficient m multiplies z^m w^(D-m)
    bool zero = false;
    int degree = 0;
};

Eliminant eliminate(const PencilEndo& f, const System& s) {
    const int d = f.degree();
    const int n = 4 * d * d + 1;
    const PrecisionProfile& prec = f.precision();
    std::vector<cplx> values(static_cast<std::size_t>(n));
    double scale = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx x = root_of_unity(j, n);
        const BinaryForm a = first_equation(f, x, 1.0);
        const BinaryForm b = second_equation(f, s, x, 1.0);
        values[static_cast<std::size_t>(j)] = resultant(a, b);
        scale = std::max(scale, std::pow(a.norm2(), b.degree()) * std::pow(b.norm2(), a.degree()));
    }
    Eliminant e;
    e.coeffs.assign(static_cast<std::size_t>(n), 0.0);
    double top = 0.0;
    for (int m = 0; m < n; ++m) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) acc += values[static_cast<std::size_t>(j)] * std::conj(root_of_unity((m * j) % n, n));
        e.coeffs[static_cast<std::size_t>(m)] = acc / static_cast<double>(n);
        top = std::max(top, std::abs(e.coeffs[static_cast<std::size_t>(m)]));
    }
    if (top <= prec.degenerate_tol * scale) {
        e.zero = true;
        return e;
    }
    for (auto& c : e.coeffs)
        if (std::abs(c) < prec.eliminant_trim_tol * top) c = 0.0;
    int deg = n - 1;
    while (deg > 0 && e.coeffs[static_cast<std::size_t>(deg)] == cplx(0.0)) --deg;
    e.degree = deg;
    // The expected degree is 2(d-1)^2 or 2d(d-1); keep that many coefficients so
    // vanishing top coefficients read as roots at [1:0].
    const int expected = s.kind == Kind::Augmented ? 2 * (d - 1) * (d - 1) : 2 * d * (d - 1);
    e.coeffs.resize(static_cast<std::size_t>(std::max(expected, deg)) + 1);
    return e;
}

void add_point(std::vector<P1>& pts, const P1& p, double tol) {
    for (const auto& q : pts)
        if (chordal(p, q) < tol) return;
    pts.push_back(p);
}

void solve_system(const PencilEndo& f, const System& s, CollisionLocus& out) {
    const Eliminant e = eliminate(f, s);
    const double accept = 1e-9, diag = 1e-6;
    auto try_candidate = [&](P1 p, bool witness) {
        std::vector<P1> qs;
        for (const BinaryForm& g : {first_equation(f, p[0], p[1]), second_equation(f, s, p[0], p[1])}) {
            if (g.is_zero()) continue;
            try {
                for (const auto& r : roots(BinaryForm(g.coeffs()), f.precision())) qs.push_back(r.point);
            } catch (const Error&) {
            }
        }
        for (P1 q : qs) {
            if (chordal(p, q) < diag) continue;
            P1 pp = p;
            const double step = polish_pair(f, s, pp, q);
            const double gap = chordal(pp, q);
            if (gap < diag || (!witness && step > 1e-6 * gap)) continue;
            const double res = pair_residual(f, pp, q, s.k);
            if (res > accept) continue;
            if (s.kind == Kind::Twisted && pair_residual(f, pp, q, 0) < accept) continue;
            bool known = false;
            for (const auto& pr : out.pairs)
                known = known || (pr.k == s.k && chordal(pr.p, pp) < 1e-7 && chordal(pr.q, q) < 1e-7);
            if (!known) out.pairs.push_back({pp, q, s.k, res});
        }
    };

    if (e.zero) {
        out.degenerate = true;
        // Positive-dimensional locus: collect a few witnesses from a grid.
        for (int j = 0; j < 16; ++j) try_candidate(make_p1(std::polar(0.5 + 0.1 * (j % 5), 0.7 + 0.37 * j), 1.0), true);
        return;
    }
    out.eliminant_degree = std::max(out.eliminant_degree, e.degree);
    PrecisionProfile loose = f.precision();
    loose.backward_error_tol = 1e-8;
    loose.cluster_tol = 1e-3;
    loose.root_max_iterations *= 2;
    const RootSet cands = roots(BinaryForm::unchecked(e.coeffs).is_zero() ? BinaryForm::monomial(1, 0)
                                                                          : BinaryForm(e.coeffs),
                                loose);
    for (const auto& c : cands) try_candidate(c.point, false);
}

void finish(CollisionLocus& loc) {
    for (const auto& pr : loc.pairs) {
        add_point(loc.points, pr.p, 1e-7);
        add_point(loc.points, pr.q, 1e-7);
    }
}

}  // namespace

CollisionLocus compute_x_minus1(const PencilEndo& f) {
    CollisionLocus loc;
    for (const auto& c : critical_points(f.P(), f.Q(), f.precision())) add_point(loc.points, c.point, 1e-7);
    for (bool qb : {false, true}) solve_system(f, {Kind::Augmented, qb, 0}, loc);
    finish(loc);
    return loc;
}

CollisionLocus compute_y_minus2(const PencilEndo& f) {
    CollisionLocus loc;
    for (const auto& r : roots(f.R(), f.precision())) add_point(loc.points, r.point, 1e-7);
    for (int k = 1; k < f.degree(); ++k)
        for (bool qb : {false, true}) solve_system(f, {Kind::Twisted, qb, k}, loc);
    finish(loc);
    return loc;
}

// ---------------------------------------------------------------------------

double distance_to_set(const P1& p, const std::vector<P1>& set) {
    double best = kInf;
    for (const auto& q : set) best = std::min(best, chordal(p, q));
    return best;
}

std::vector<P1> dedupe(const std::vector<P1>& pts, double tol) {
    std::vector<P1> out;
    for (const auto& p : pts) add_point(out, p, tol);
    return out;
}

bool same_set(const std::vector<P1>& a, const std::vector<P1>& b, double tol, double* worst) {
    double w = 0.0;
    for (const auto& p : a) w = std::max(w, distance_to_set(p, b));
    for (const auto& p : b) w = std::max(w, distance_to_set(p, a));
    if (worst) *worst = w;
    return w < tol;
}

SpecialSets assemble_sets(const PencilEndo& f) {
    SpecialSets s;
    const double tol = s.set_tol;
    const CollisionLocus xl = compute_x_minus1(f), yl = compute_y_minus2(f);
    s.degenerate = xl.degenerate || yl.degenerate;
    s.x_minus1 = xl.points;
    s.y_minus2 = yl.points;
    std::vector<P1> tmp;
    for (const auto& p : s.x_minus1) tmp.push_back(base_apply(f, p));
    s.x_set = dedupe(tmp, tol);
    tmp.clear();
    for (const auto& p : s.y_minus2) tmp.push_back(base_apply(f, p));
    s.y_minus1 = dedupe(tmp, tol);
    tmp.clear();
    for (const auto& p : s.y_minus1) tmp.push_back(base_apply(f, p));
    s.y_set = dedupe(tmp, tol);
    tmp = s.x_set;
    tmp.insert(tmp.end(), s.y_set.begin(), s.y_set.end());
    s.z_set = dedupe(tmp, tol);
    tmp.clear();
    for (const auto& z : s.z_set)
        for (const auto& nl : base_preimages(f, z)) tmp.push_back(nl.base);
    s.pre_z = dedupe(tmp, tol);
    tmp.clear();
    for (const auto& z : s.pre_z)
        for (const auto& nl : base_preimages(f, z)) tmp.push_back(nl.base);
    s.pre2_z = dedupe(tmp, tol);
    for (const auto& z : s.z_set)
        if (distance_to_set(z, s.pre_z) < tol) s.script_z.push_back(z);

    tmp = s.x_set;
    for (const auto* v : {&s.y_set, &s.pre_z, &s.pre2_z}) tmp.insert(tmp.end(), v->begin(), v->end());
    const std::vector<P1> all = dedupe(tmp, tol);
    double m = 1.0;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) m = std::min(m, chordal(all[i], all[j]));
    s.margin_r = 0.5 * m;
    return s;
}

ConditionVerdict check_conditions(const SpecialSets& sets, const PencilEndo& f) {
    ConditionVerdict v;
    const double tol = 2.0 * f.precision().point_tol;
    v.tolerance = tol;
    if (sets.degenerate) return v;

    v.cond1_margin = 1.0;
    for (const auto& x : sets.x_set) v.cond1_margin = std::min(v.cond1_margin, distance_to_set(x, sets.y_set));
    v.cond1_disjoint = v.cond1_margin > tol;

    v.cond2_margin = 1.0;
    for (const auto& z : sets.z_set) {
        const double m = std::max(distance_to_set(z, sets.pre_z), distance_to_set(z, sets.pre2_z));
        v.cond2_margin = std::min(v.cond2_margin, m);
        if (m <= tol) v.triple.push_back(z);
    }
    v.cond2_chain = v.cond2_margin > tol;

    v.cond2_simplified_margin = 1.0;
    for (const auto& z : sets.z_set)
        v.cond2_simplified_margin = std::min(v.cond2_simplified_margin, distance_to_set(z, sets.pre_z));
    v.cond2_simplified = v.cond2_simplified_margin > tol;

    const P1 infinity = make_p1(1.0, 0.0);
    v.cond_53_relaxed = v.triple.size() == 1 && chordal(v.triple.front(), infinity) <= tol;
    return v;
}

double gamma_at(const PencilEndo& f, const SpecialSets& sets, double r, const P1& l) {
    const int d = f.degree();
    const bool x_part = distance_to_set(l, sets.x_set) >= r;
    const bool y_part = distance_to_set(base_apply(f, l), sets.y_set) >= r;
    if (!x_part && !y_part) return kInf;
    std::vector<cplx> rv;
    std::vector<double> mv;
    for (const auto& nl : base_preimages(f, l)) {
        for (int m = 0; m < nl.multiplicity; ++m) {
            rv.push_back(f.R()(nl.z, nl.w));
            mv.push_back(std::max(std::abs(nl.z), std::abs(nl.w)));
        }
    }
    double best = kInf;
    for (std::size_t i = 0; i < rv.size(); ++i)
        for (std::size_t j = i; j < rv.size(); ++j) {
            const double denom = std::pow(mv[i] + mv[j], d);
            if (x_part && i != j) best = std::min(best, std::abs(rv[i] - rv[j]) / denom);
            if (y_part)
                for (int k = 1; k < d; ++k)
                    best = std::min(best, std::abs(rv[i] - root_of_unity(k, d) * rv[j]) / denom);
        }
    return best;
}

double estimate_gamma(const PencilEndo& f, const SpecialSets& sets, double r, int grid) {
    struct Seed {
        double value;
        P1 point;
    };
    std::vector<Seed> seeds;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < grid; ++i) {
        const double zc = 1.0 - 2.0 * (i + 0.5) / grid;
        const double half = 0.5 * std::acos(zc);
        const P1 l({std::cos(half), std::polar(std::sin(half), -golden * i)});
        const double g = gamma_at(f, sets, r, l);
        if (std::isfinite(g)) seeds.push_back({g, l});
    }
    if (seeds.empty()) return kInf;
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.value < b.value; });
    double best = seeds.front().value;
    const std::size_t n_refine = std::min<std::size_t>(16, seeds.size());
    for (std::size_t s = 0; s < n_refine; ++s) {
        P1 cur = seeds[s].point;
        double val = seeds[s].value;
        for (double h = 0.02; h > 1e-8;) {
            cplx x;
            const int chart = chart_of(cur, x);
            bool moved = false;
            for (int dir = 0; dir < 8; ++dir) {
                const P1 cand = chart_point(chart, x + std::polar(h, dir * kPi / 4));
                const double g = gamma_at(f, sets, r, cand);
                if (g < val) {
                    val = g;
                    cur = cand;
                    moved = true;
                    break;
                }
            }
            if (!moved) h *= 0.5;
        }
        best = std::min(best, val);
    }
    return best;
}

double epsilon_max(double alpha_lo, double gamma_hat, int d, double beta) {
    return std::pow(gamma_hat * std::pow(alpha_lo / (4.0 * beta), d), 1.0 / (d - 1));
}

}  // namespace attract
