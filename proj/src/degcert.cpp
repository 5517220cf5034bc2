#include <algorithm>
#include <cmath>

#include "attract/degree_cert.hpp"
#include "attract/precise.hpp"

namespace attract {

namespace {

// Membership in f(U) decided from a precise lift, since a double-only
// inversion of a deep node cannot tell which fiber preimage lies in U.
bool in_fU_precise(const PencilEndo& f, const PreciseLift& y, double rho) {
    const auto pre = precise_preimages(f, y);
    return std::any_of(pre.begin(), pre.end(),
                       [&](const PrecisePreimage& q) { return in_U(q.lift.point(), rho); });
}

bool in_region(const PencilEndo& f, const PreciseLift& y, Region region, double rho) {
    switch (region) {
        case Region::All: return true;
        case Region::U: return in_U(y.point(), rho);
        case Region::FU: return in_U(y.point(), rho) && in_fU_precise(f, y, rho);
    }
    return false;
}

}  // namespace

PreimageCount count_preimages_in(const PencilEndo& f, const P2& x, int m, Region region, double rho,
                                 bool prune_intermediate, double budget) {
    return count_preimages_in(f, precise_lift(x), m, region, rho, prune_intermediate, budget);
}

PreimageCount count_preimages_in(const PencilEndo& f, const PreciseLift& x, int m, Region region, double rho,
                                 bool prune_intermediate, double budget) {
    if (m < 0) throw Error(ErrorKind::ConfigInvalid, "negative iterate");
    if (std::pow(static_cast<double>(f.degree()), 2 * m) > budget)
        throw Error(ErrorKind::BudgetExceeded, "preimage tree exceeds the budget");
    struct Node {
        PreciseLift lift;
        int mult;
    };
    // Lifts are carried in double-double; each fiber inversion cancels
    // roughly three digits, so doubles run out after two or three levels.
    std::vector<Node> level{{x, 1}};
    for (int n = 0; n < m; ++n) {
        std::vector<Node> next;
        for (const auto& node : level) {
            for (const auto& y : precise_preimages(f, node.lift)) {
                if (prune_intermediate && n + 1 < m && !in_U(y.lift.point(), rho)) continue;
                next.push_back({y.lift, node.mult * y.multiplicity});
            }
        }
        level = std::move(next);
    }
    PreimageCount c;
    for (const auto& node : level) {
        if (!in_region(f, node.lift, region, rho)) continue;
        c.weighted += node.mult;
        ++c.distinct;
    }
    return c;
}

DegreeCertificate certify_degree(const PencilEndo& f, double rho, int m, int samples, std::uint64_t seed,
                                 Region region) {
    DegreeCertificate c;
    const int d = f.degree();
    c.iterate_m = m;
    c.threshold = static_cast<int>(std::lround(std::pow(d, m)));

    // Critical values of f_inf^j for j = 1..m; samples whose base point is near
    // one of them sit where root clustering is unreliable.
    std::vector<P1> crit_values;
    for (const auto& cp : critical_points(f.P(), f.Q(), f.precision())) {
        P1 v = cp.point;
        for (int j = 0; j < m; ++j) {
            v = base_apply(f, v);
            crit_values.push_back(v);
        }
    }

    Rng rng(seed);
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        PreciseLift x;
        for (int attempt = 0;; ++attempt) {
            x = precise_iterate(f, precise_lift(sample_U(rng, rho)), m + 1);
            const P1 b = make_p1(x.z.value(), x.w.value());
            const bool near = std::any_of(crit_values.begin(), crit_values.end(),
                                          [&](const P1& v) { return chordal(b, v) < 1e-8; });
            if (!near || attempt > 20) break;
            ++c.resampled;
        }
        const PreimageCount full = count_preimages_in(f, x, m, region, rho, false);
        const PreimageCount pruned = count_preimages_in(f, x, m, region, rho, true);
        const PreimageCount one = count_preimages_in(f, x, 1, Region::U, rho, false);
        if (full.weighted > c.max_count || i == 0) {
            c.max_count = std::max(c.max_count, full.weighted);
            c.worst_point = x.point();
        }
        c.min_count = i == 0 ? full.weighted : std::min(c.min_count, full.weighted);
        c.max_count_pruned = std::max(c.max_count_pruned, pruned.weighted);
        c.max_distinct = std::max(c.max_distinct, full.distinct);
        c.dt_one_step = std::max(c.dt_one_step, one.weighted);
        total += full.weighted;
    }
    c.samples = samples;
    c.mean_count = samples > 0 ? total / samples : 0.0;
    c.verdict = samples > 0 && c.max_count < c.threshold;
    return c;
}

std::vector<std::pair<int, double>> asymptotic_rate(const PencilEndo& f, double rho, const P2& p, int n_max,
                                                    double budget) {
    if (std::pow(static_cast<double>(f.degree()), 2 * n_max) > budget)
        throw Error(ErrorKind::BudgetExceeded, "asymptotic rate tree exceeds the budget");
    std::vector<std::pair<int, double>> out;
    for (int n = 1; n <= n_max; ++n) {
        // Cardinality of the preimage set, so repeated points count once.
        const int count = count_preimages_in(f, p, n, Region::U, rho, true, budget).distinct;
        out.emplace_back(n, std::pow(static_cast<double>(count), 1.0 / n));
    }
    return out;
}

}  // namespace attract
