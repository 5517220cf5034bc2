#pragma once

#include <cstdint>
#include <vector>

#include "attract/pencil_map.hpp"
#include "attract/sampling.hpp"

namespace attract {

struct TrappingCertificate {
    double alpha_lo = 0.0;
    double beta_hi = 0.0;
    cplx epsilon_used = 0.0;
    double rho = 0.0;               // 4 |eps| beta / alpha
    double inequality_slack = 0.0;  // rho - (rho^d + |eps| beta) / alpha
    double predicted_delta = 0.0;   // slack / rho, the guaranteed relative margin
    double sampled_delta = 0.0;     // 1 - max sampled |t'| / (rho max(|z'|,|w'|))
    bool sampled_ok = false;
    int samples = 0;
};

/// Constants and analytic slack only; no sampling, never throws.
TrappingCertificate trapping_constants(const PencilEndo& f, const SphereExtrema& ex);

/// Analytic slack plus a boundary-biased Monte Carlo check that f(U_rho) lies
/// in U_{rho (1 - delta)}. Throws TrappingFails when the slack is not positive.
TrappingCertificate certify_trapping(const PencilEndo& f, int samples = 10000, std::uint64_t seed = 1);
TrappingCertificate certify_trapping(const PencilEndo& f, const SphereExtrema& ex, int samples, std::uint64_t seed);

bool in_U(const P2& x, double rho);
bool in_fU(const PencilEndo& f, const P2& x, double rho);

/// Base point Fubini-Study uniform, fiber coordinate uniform in the disc.
P2 sample_U(Rng& rng, double rho);

/// Forward images after `burn` steps of `keep` independent uniform points of U_rho.
std::vector<P2> sample_attractor(const PencilEndo& f, double rho, int burn, int keep, std::uint64_t seed);

/// Fiber coordinate of x on the line over p: x = [lambda p^ : t] gives t / lambda
/// for the canonical unit lift p^ of p.
cplx fiber_coordinate(const P1& p, const P2& x);

struct SolenoidAtom {
    P2 point;
    int itineraries;  // backward itineraries landing on this point, with multiplicity
};

/// f^depth([z_-depth : w_-depth : 0]) over all backward base itineraries of p.
std::vector<SolenoidAtom> solenoid_atoms(const PencilEndo& f, const P1& p, int depth, double budget = 1e6);
std::vector<P2> solenoid_points(const PencilEndo& f, const P1& p, int depth, double budget = 1e6);

}  // namespace attract
