#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "attract/precise.hpp"
#include "attract/trapping.hpp"

namespace attract {

/// log(|t| / ||x||), the quasi-potential of the line current [{t = 0}] in the
/// Fubini-Study gauge. Minus infinity on the line.
double u0(const P2& x);

/// (1/d) sum u(y) - (1/d^2) sum phi(y) over f(y) = x with multiplicity, where
/// phi is the Green correction. If u is a quasi-potential of T then the result
/// is one of (1/d) f_* T.
double push_potential(const PencilEndo& f, const std::function<double(const P2&)>& u, const P2& x);

/// u_n = n-fold push of u0, unrolled over the full preimage tree in
/// double-double. Pure in (f, x, n).
class PotentialEvaluator {
public:
    explicit PotentialEvaluator(PencilEndo f, double budget = 1e7) : f_(std::move(f)), budget_(budget) {}

    double operator()(const P2& x, int n) const { return eval(precise_lift(x), n); }
    double eval(const PreciseLift& x, int n) const;
    const PencilEndo& map() const { return f_; }

private:
    double rec(const PreciseLift& x, int n) const;
    PencilEndo f_;
    double budget_;
};

enum class TraceVerdict { Bounded, Diverging, Inconclusive };
std::string to_string(TraceVerdict v);

struct TraceOptions {
    int n_max = 6;
    int samples = 64;
    std::uint64_t seed = 1;
    double plateau_rel = 0.05;  // relative change counted as flat
    int plateau_run = 3;        // consecutive flat (or growing) steps needed
    int degree_samples = 200;   // for the predicted contraction
    // Replace the sample set at step n by each sample's base point at fiber
    // radius rho and at rho 2^-n. Used to watch potentials near the line.
    bool shrink_radius = false;
};

struct PotentialTrace {
    std::vector<std::pair<int, double>> spreads;
    double predicted_contraction = 0.0;  // dt_one_step / d
    double predicted_contraction_m = 0.0;  // max m-fold count / d^m with m = 3
    int dt_one_step = 0;
    // Smallest c with s_{n+3} <= a s_n + s_3 + c along the trace, a the 3-step
    // ratio, and the resulting bound (s_3 + c) / (1 - a); infinite if a >= 1.
    double c_hat = 0.0;
    double plateau_bound = 0.0;
    TraceVerdict verdict = TraceVerdict::Inconclusive;
    int resampled = 0;  // samples dropped for hitting the pole locus
};

/// Spread (max - min) of u_n over a fixed sample set in f(U_rho), n = 0..n_max.
PotentialTrace potential_trace(const PencilEndo& f, double rho, const TraceOptions& opt = {});

/// Classification of a spread sequence; exposed for testing.
TraceVerdict classify_spreads(const std::vector<std::pair<int, double>>& spreads, double rel, int run);

struct SliceAtom {
    cplx s;  // fiber chart coordinate over the base point
    double weight;
};

struct SliceMeasure {
    P1 base = make_p1(1.0, 0.0);
    std::vector<SliceAtom> atoms;
    double total_weight() const;
};

/// Slice of d^-depth (f^depth)_* [{t = 0}] on the line over p.
SliceMeasure slice_measure(const PencilEndo& f, const P1& p, int depth, double budget = 1e6);

/// Transport cost between the depth n and depth n + 1 slices under the
/// coupling that matches each itinerary with its truncation. An upper bound
/// for the Wasserstein-1 distance.
double slice_refinement(const PencilEndo& f, const P1& p, int n, double budget = 1e6);

/// sum weight log|w - s| over the atoms.
double canonical_potential(const SliceMeasure& mu, cplx w);

}  // namespace attract
