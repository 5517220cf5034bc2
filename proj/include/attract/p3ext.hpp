#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "attract/degree_cert.hpp"
#include "attract/precise.hpp"
#include "attract/trapping.hpp"

namespace attract {

enum class P3Variant { InvariantHyperplane, ProductType };

/// Skew product [P : Q : t^d + eps1 R : u^d + eps2 R2] over a shared base.
/// Both fibers are pencil maps over f_inf = [P : Q], so each is stored as one.
///   InvariantHyperplane: R2 = Q - eps2^{d-1} w^d, the hyperplane u = eps2 w
///     is invariant and the u-region is centred on it.
///   ProductType: [z^2 + 0.1 w^2 : w^2 : t1^2 + eps1 (z^2 + zw) : t2^2 + eps2 (z^2 + zw)].
struct P3Endo {
    P3Variant variant = P3Variant::InvariantHyperplane;
    PencilEndo first;   // (z, w, t)
    PencilEndo second;  // (z, w, u)
    cplx eps1 = 0.0, eps2 = 0.0;
    cplx u_center = 0.0;  // the u-region is |u - u_center w| < rho2 max(|z|, |w|)

    int degree() const { return first.degree(); }
};

/// Checks the base prerequisites (special-set conditions and the fixed point
/// condition on [1:0]) and throws PrerequisiteFailed naming the failures.
P3Endo build_invariant_hyperplane(const BinaryForm& P, const BinaryForm& Q, const BinaryForm& R, cplx eps1, cplx eps2);
/// Same construction without the prerequisite checks.
P3Endo make_invariant_hyperplane(const BinaryForm& P, const BinaryForm& Q, const BinaryForm& R, cplx eps1, cplx eps2);
P3Endo build_product_type(cplx eps1, cplx eps2);

P3 apply3(const P3Endo& f, const P3& x);
P2 project_first(const P3& x);   // [z : w : t]
P2 project_second(const P3& x);  // [z : w : u]

/// True iff chordal(f_inf^i([1:0]), [1:0]) > tol for i = 1..n_max.
bool check_fixed_point_condition(const BinaryForm& P, const BinaryForm& Q, int n_max = 6, double tol = 1e-9);

struct P3Region {
    double rho1 = 0.0, rho2 = 0.0;
};

bool in_U3(const P3Endo& f, const P3Region& r, const P3& x);
P3 sample_U3(const P3Endo& f, const P3Region& r, Rng& rng);

struct P3Trapping {
    double slack1 = 0.0;         // analytic slack of the first fiber
    double slack2 = 0.0;         // rho2 - ((1 + c)^d - 1) |eps2|^d / alpha with c = rho2 / |eps2|
    double sampled_delta1 = 0.0;
    double sampled_delta2 = 0.0;
    int samples = 0;
    bool ok() const { return slack1 > 0.0 && sampled_delta1 > 0.0 && sampled_delta2 > 0.0; }
};

/// Region for the invariant-hyperplane map: rho1 from the first fiber's
/// trapping constants, rho2 = c |eps2|.
P3Region p3_region(const P3Endo& f, double c = 0.1);
P3Trapping certify_p3_trapping(const P3Endo& f, const P3Region& r, int samples, std::uint64_t seed);

/// m-fold preimages of x lying in f(U), enumerated base first, then each
/// fiber separately. Region::All gives the unconstrained count.
PreimageCount count_p3_preimages(const P3Endo& f, const P3Region& r, const P3& x, int m, Region region);

/// Samples x = f^{m+1}(x0) for x0 uniform in U; threshold d^m.
DegreeCertificate certify_p3_degree(const P3Endo& f, const P3Region& r, int m, int samples, std::uint64_t seed);

/// Max |u' - eps2 w'| / ||x'|| over images of random points of the hyperplane.
double hyperplane_residual(const P3Endo& f, int samples, std::uint64_t seed);

struct Box {
    double inner = 0.8, outer = 1.2;  // inner |w| < |z| < outer |w|
    double rho = 0.0;                 // |t| < rho max(|z|, |w|)
};

bool in_box(const Box& b, const P2& x);

struct HorizontalLikeReport {
    bool vertical_ok = false;  // f(d_v B) misses B
    double vertical_margin = 0.0;
    bool horizontal_ok = false;  // f(closure B) meets the boundary only in d_v B
    double horizontal_margin = 0.0;
    bool base_ok = false;  // f_inf^-1(W) compactly inside W, hence W inside f_inf(W)
    double base_margin = 0.0;
    int boundary_samples = 0;
    int injectivity_samples = 0;
    int max_preimages = 0;  // preimages in f(B) of points of f^2(B)
    int min_preimages = 0;
    P2 vertical_witness = make_p2(0.0, 0.0, 1.0);
    P2 horizontal_witness = make_p2(0.0, 0.0, 1.0);

    bool horizontal_like() const { return vertical_ok && horizontal_ok; }
    bool henon_like() const { return horizontal_like() && max_preimages <= 1; }
};

HorizontalLikeReport horizontal_like_check(const PencilEndo& f, const Box& box, int boundary_samples = 10000,
                                           int injectivity_samples = 1000, std::uint64_t seed = 1);

struct BoxCounting {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::vector<std::pair<double, int>> counts;  // (scale, occupied boxes)
};

/// Least-squares slope of log N(delta) against log(1/delta).
BoxCounting box_counting_dim(const std::vector<std::array<double, 2>>& cloud, const std::vector<double>& scales);

/// Geometric scale ladder from hi down to lo.
std::vector<double> scale_ladder(double hi, double lo, int count);

/// Fiber-chart coordinates of a slice as plane points.
std::vector<std::array<double, 2>> fiber_chart_cloud(const P1& p, const std::vector<P2>& points);

}  // namespace attract
