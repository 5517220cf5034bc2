#include <algorithm>
#include <cmath>

#include "attract/trapping.hpp"

namespace attract {

namespace {

double fiber_ratio(const P2& x) { return std::abs(x[2]) / x.base_max(); }

}  // namespace

TrappingCertificate trapping_constants(const PencilEndo& f, const SphereExtrema& ex) {
    TrappingCertificate c;
    const int d = f.degree();
    c.alpha_lo = ex.alpha_lo;
    c.beta_hi = ex.beta_hi;
    c.epsilon_used = f.epsilon();
    const double eb = std::abs(f.epsilon()) * ex.beta_hi;
    c.rho = 4.0 * eb / ex.alpha_lo;
    c.inequality_slack = c.rho - (std::pow(c.rho, d) + eb) / ex.alpha_lo;
    c.predicted_delta = c.rho > 0.0 ? c.inequality_slack / c.rho : 0.0;
    return c;
}

TrappingCertificate certify_trapping(const PencilEndo& f, int samples, std::uint64_t seed) {
    return certify_trapping(f, sphere_extrema(f.P(), f.Q(), f.R()), samples, seed);
}

TrappingCertificate certify_trapping(const PencilEndo& f, const SphereExtrema& ex, int samples, std::uint64_t seed) {
    TrappingCertificate c = trapping_constants(f, ex);
    if (!(c.inequality_slack > 0.0))
        throw Error(ErrorKind::TrappingFails, "slack " + std::to_string(c.inequality_slack) + " at rho " +
                                                  std::to_string(c.rho));
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        // Half the samples sit within 1e-3 of the fiber-disc boundary.
        const P1 b = rng.p1();
        const double radius = (i % 2 == 0) ? std::sqrt(rng.uniform()) : 1.0 - 1e-3 * rng.uniform();
        const cplx t = std::polar(radius * c.rho * b.base_max(), 2.0 * kPi * rng.uniform());
        const P2 y = apply(f, P2({b[0], b[1], t}));
        worst = std::max(worst, fiber_ratio(y) / c.rho);
    }
    c.samples = samples;
    c.sampled_delta = 1.0 - worst;
    c.sampled_ok = c.sampled_delta > 0.0;
    return c;
}

bool in_U(const P2& x, double rho) { return std::abs(x[2]) < rho * x.base_max(); }

bool in_fU(const PencilEndo& f, const P2& x, double rho) {
    const PreimageResult pr = preimages(f, x);
    return std::any_of(pr.points.begin(), pr.points.end(), [&](const Preimage& y) { return in_U(y.point, rho); });
}

P2 sample_U(Rng& rng, double rho) {
    const P1 b = rng.p1();
    return P2({b[0], b[1], rng.disc(rho * b.base_max())});
}

std::vector<P2> sample_attractor(const PencilEndo& f, double rho, int burn, int keep, std::uint64_t seed) {
    std::vector<P2> out;
    out.reserve(static_cast<std::size_t>(keep));
    for (int i = 0; i < keep; ++i) {
        Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(i));
        out.push_back(iterate(f, sample_U(rng, rho), burn));
    }
    return out;
}

cplx fiber_coordinate(const P1& p, const P2& x) {
    const cplx lambda = x[0] * std::conj(p[0]) + x[1] * std::conj(p[1]);
    return x[2] / lambda;
}

std::vector<SolenoidAtom> solenoid_atoms(const PencilEndo& f, const P1& p, int depth, double budget) {
    if (depth < 1) throw Error(ErrorKind::ConfigInvalid, "solenoid depth must be at least 1");
    if (std::pow(static_cast<double>(f.degree()), depth) > budget)
        throw Error(ErrorKind::DepthExceeded, "d^depth exceeds the itinerary budget");
    // Distinct parents have disjoint preimages, and base_preimages already
    // merges a repeated root into one entry with its multiplicity.
    std::vector<std::pair<P1, int>> level{{p, 1}};
    for (int n = 0; n < depth; ++n) {
        std::vector<std::pair<P1, int>> next;
        next.reserve(level.size() * static_cast<std::size_t>(f.degree()));
        for (const auto& [q, count] : level)
            for (const auto& nl : base_preimages(f, q)) next.emplace_back(nl.base, count * nl.multiplicity);
        level = std::move(next);
    }
    std::vector<SolenoidAtom> out;
    out.reserve(level.size());
    for (const auto& [q, count] : level) out.push_back({iterate(f, P2({q[0], q[1], 0.0}), depth), count});
    return out;
}

std::vector<P2> solenoid_points(const PencilEndo& f, const P1& p, int depth, double budget) {
    std::vector<P2> out;
    for (const auto& a : solenoid_atoms(f, p, depth, budget)) out.push_back(a.point);
    return out;
}

}  // namespace attract
