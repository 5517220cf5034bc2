#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "attract/precise.hpp"
#include "attract/trapping.hpp"

namespace attract {

enum class Region { All, U, FU };

struct PreimageCount {
    int weighted = 0;  // with multiplicity
    int distinct = 0;
};

/// m-fold preimages of x lying in the region. The default prunes only at the
/// final level. With prune_intermediate, nodes outside U_rho are dropped at
/// every level; because f(U_rho) lies inside U_rho the final count for U and
/// f(U) regions is unchanged, only the work shrinks.
PreimageCount count_preimages_in(const PencilEndo& f, const P2& x, int m, Region region, double rho,
                                 bool prune_intermediate = false, double budget = 1e7);
/// Same count from a double-double lift. Backward fiber steps expand errors by
/// about 1/(d|t|^{d-1}) per level, so the target itself must be precise.
PreimageCount count_preimages_in(const PencilEndo& f, const PreciseLift& x, int m, Region region, double rho,
                                 bool prune_intermediate = false, double budget = 1e7);

struct DegreeCertificate {
    int iterate_m = 0;
    int samples = 0;
    int max_count = 0;
    int min_count = 0;  // should be >= 1; 0 flags a sample lost to conditioning
    int max_count_pruned = 0;  // same quantity via intermediate pruning
    int max_distinct = 0;
    double mean_count = 0.0;
    int threshold = 0;
    bool verdict = false;
    P2 worst_point = make_p2(0.0, 0.0, 1.0);
    int dt_one_step = 0;
    int resampled = 0;  // draws rejected near critical values
};

/// Samples x = f^{m+1}(x0) with x0 uniform in U_rho and counts m-fold
/// preimages in f(U_rho). Threshold d^m.
DegreeCertificate certify_degree(const PencilEndo& f, double rho, int m, int samples, std::uint64_t seed,
                                 Region region = Region::FU);

/// (n, count^{1/n}) for n = 1..n_max, counting distinct n-fold preimages of p in U_rho.
std::vector<std::pair<int, double>> asymptotic_rate(const PencilEndo& f, double rho, const P2& p, int n_max,
                                                    double budget = 1e7);

}  // namespace attract
