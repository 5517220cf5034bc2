#include <algorithm>
#include <cmath>
#include <limits>

#include "attract/degree_cert.hpp"
#include "attract/potential.hpp"

namespace attract {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double spread_of(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

}  // namespace

double u0(const P2& x) {
    // The stored lift has unit norm.
    const double a = std::abs(x[2]);
    return a > 0.0 ? std::log(a) : kNegInf;
}

double push_potential(const PencilEndo& f, const std::function<double(const P2&)>& u, const P2& x) {
    const double d = f.degree();
    double acc = 0.0;
    for (const auto& y : preimages(f, x).points)
        acc += y.multiplicity * (u(y.point) / d - green_correction(f, y.point) / (d * d));
    return acc;
}

double PotentialEvaluator::eval(const PreciseLift& x, int n) const {
    if (n < 0) throw Error(ErrorKind::ConfigInvalid, "negative push count");
    if (std::pow(static_cast<double>(f_.degree()), 2 * n) > budget_)
        throw Error(ErrorKind::BudgetExceeded, "potential tree exceeds the budget");
    return rec(x, n);
}

double PotentialEvaluator::rec(const PreciseLift& x, int n) const {
    if (n == 0) return u0(x.point());
    const double d = f_.degree();
    double acc = 0.0;
    for (const auto& y : precise_preimages(f_, x)) {
        const P2 yp = y.lift.point();
        acc += y.multiplicity * (rec(y.lift, n - 1) / d - green_correction(f_, yp) / (d * d));
    }
    return acc;
}

std::string to_string(TraceVerdict v) {
    switch (v) {
        case TraceVerdict::Bounded: return "bounded";
        case TraceVerdict::Diverging: return "diverging";
        case TraceVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

TraceVerdict classify_spreads(const std::vector<std::pair<int, double>>& spreads, double rel, int run) {
    const int len = static_cast<int>(spreads.size());
    if (len < run + 1) return TraceVerdict::Inconclusive;
    bool flat = true, growing = true;
    const double first_step = spreads[1].second - spreads[0].second;
    for (int i = len - run; i < len; ++i) {
        const double prev = spreads[static_cast<std::size_t>(i) - 1].second, cur = spreads[static_cast<std::size_t>(i)].second;
        const double step = cur - prev;
        flat = flat && std::abs(step) < rel * std::abs(prev);
        // Sustained growth: every late step keeps at least half the first one.
        growing = growing && step >= rel * std::abs(prev) && step >= 0.5 * first_step && first_step > 0.0;
    }
    if (flat) return TraceVerdict::Bounded;
    if (growing) return TraceVerdict::Diverging;
    return TraceVerdict::Inconclusive;
}

PotentialTrace potential_trace(const PencilEndo& f, double rho, const TraceOptions& opt) {
    if (opt.n_max < 1 || opt.samples < 2) throw Error(ErrorKind::ConfigInvalid, "trace needs n_max >= 1 and two samples");
    const PotentialEvaluator eval(f);
    PotentialTrace tr;
    const int d = f.degree();

    const DegreeCertificate dc = certify_degree(f, rho, 3, opt.degree_samples, opt.seed ^ 0x5eedULL);
    tr.dt_one_step = dc.dt_one_step;
    tr.predicted_contraction = static_cast<double>(dc.dt_one_step) / d;
    tr.predicted_contraction_m = static_cast<double>(dc.max_count) / std::pow(d, 3);

    // values[i][n] = u_n at sample i.
    std::vector<std::vector<double>> values;
    std::vector<P1> bases;
    Rng rng(opt.seed);
    while (static_cast<int>(values.size()) < opt.samples) {
        const PreciseLift x = precise_apply(f, precise_lift(sample_U(rng, rho)));
        std::vector<double> row;
        for (int n = 0; n <= opt.n_max; ++n) row.push_back(eval.eval(x, n));
        if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
            ++tr.resampled;
            continue;
        }
        values.push_back(std::move(row));
        const P2 xp = x.point();
        bases.push_back(make_p1(xp[0], xp[1]));
    }

    for (int n = 0; n <= opt.n_max; ++n) {
        std::vector<double> col;
        if (opt.shrink_radius) {
            // Reference points on the fiber circle of radius rho against the
            // same bases at radius rho 2^-n.
            const double r = rho * std::ldexp(1.0, -n);
            for (const auto& b : bases) {
                col.push_back(eval(P2({b[0], b[1], rho * b.base_max()}), n));
                col.push_back(eval(P2({b[0], b[1], r * b.base_max()}), n));
            }
        } else {
            for (const auto& row : values) col.push_back(row[static_cast<std::size_t>(n)]);
        }
        tr.spreads.emplace_back(n, spread_of(col));
    }

    // Geometric-series bound for the 3-step recursion s_{n+3} <= a s_n + s_3 + c.
    constexpr std::size_t m = 3;
    const double a = tr.predicted_contraction_m;
    tr.plateau_bound = std::numeric_limits<double>::infinity();
    if (tr.spreads.size() > m && a < 1.0) {
        const double sm = tr.spreads[m].second;
        for (std::size_t n = 0; n + m < tr.spreads.size(); ++n)
            tr.c_hat = std::max(tr.c_hat, tr.spreads[n + m].second - a * tr.spreads[n].second - sm);
        tr.plateau_bound = (sm + tr.c_hat) / (1.0 - a);
    }
    tr.verdict = classify_spreads(tr.spreads, opt.plateau_rel, opt.plateau_run);
    return tr;
}

double SliceMeasure::total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

SliceMeasure slice_measure(const PencilEndo& f, const P1& p, int depth, double budget) {
    if (std::pow(static_cast<double>(f.degree()), depth) > budget)
        throw Error(ErrorKind::BudgetExceeded, "slice depth exceeds the budget");
    SliceMeasure mu;
    mu.base = p;
    const double w = std::pow(static_cast<double>(f.degree()), -depth);
    for (const auto& a : solenoid_atoms(f, p, depth, budget)) mu.atoms.push_back({fiber_coordinate(p, a.point), a.itineraries * w});
    // Exactly coincident atoms (the whole slice, when t = 0 is invariant) merge.
    std::sort(mu.atoms.begin(), mu.atoms.end(), [](const SliceAtom& a, const SliceAtom& b) {
        return a.s.real() < b.s.real() || (a.s.real() == b.s.real() && a.s.imag() < b.s.imag());
    });
    std::vector<SliceAtom> merged;
    for (const auto& a : mu.atoms) {
        if (!merged.empty() && merged.back().s == a.s) merged.back().weight += a.weight;
        else merged.push_back(a);
    }
    mu.atoms = std::move(merged);
    return mu;
}

double slice_refinement(const PencilEndo& f, const P1& p, int n, double budget) {
    if (n < 1) throw Error(ErrorKind::ConfigInvalid, "refinement depth must be at least 1");
    if (std::pow(static_cast<double>(f.degree()), n + 1) > budget)
        throw Error(ErrorKind::BudgetExceeded, "slice depth exceeds the budget");
    // Level n+1 of the backward base tree, each node with its multiplicity.
    std::vector<std::pair<P1, int>> level{{p, 1}};
    for (int k = 0; k <= n; ++k) {
        std::vector<std::pair<P1, int>> next;
        for (const auto& [q, c] : level)
            for (const auto& nl : base_preimages(f, q)) next.emplace_back(nl.base, c * nl.multiplicity);
        level = std::move(next);
    }
    const double w = std::pow(static_cast<double>(f.degree()), -(n + 1));
    const CDD p0 = std::conj(p[0]), p1 = std::conj(p[1]);
    const auto chart = [&](const PreciseLift& x) { return x.t / (x.z * p0 + x.w * p1); };
    double cost = 0.0;
    for (const auto& [q, c] : level) {
        // Both itineraries pass through the same base point f_inf(q); the
        // truncated one restarts there on the line t = 0. Double-double keeps
        // the difference above rounding for several more levels.
        const PreciseLift y = precise_apply(f, precise_lift(P2({q[0], q[1], 0.0})));
        const PreciseLift fine = precise_iterate(f, y, n);
        const PreciseLift coarse = precise_iterate(f, {y.z, y.w, CDD(cplx(0.0))}, n);
        cost += c * w * abs(chart(fine) - chart(coarse));
    }
    return cost;
}

double canonical_potential(const SliceMeasure& mu, cplx w) {
    double acc = 0.0;
    for (const auto& a : mu.atoms) {
        const double r = std::abs(w - a.s);
        if (r == 0.0) return kNegInf;
        acc += a.weight * std::log(r);
    }
    return acc;
}

}  // namespace attract
