#pragma once

#include <vector>

#include "attract/pencil_map.hpp"

namespace attract {

/// Off-diagonal pair (p, q) with f_inf(p) = f_inf(q). k = 0 marks an
/// augmented-map collision; k >= 1 marks R(p^) = e^{2 i pi k/d} R(q^) on
/// normalized lifts.
struct PairSolution {
    P1 p, q;
    int k;
    double residual;
};

struct CollisionLocus {
    std::vector<P1> points;  // first components, closed under partner exchange
    std::vector<PairSolution> pairs;
    bool degenerate = false;
    int eliminant_degree = 0;  // largest numerical degree seen
};

/// Critical points of f_inf plus first components of off-diagonal collisions
/// of the augmented base map.
CollisionLocus compute_x_minus1(const PencilEndo& f);

/// Roots of R plus first components of off-diagonal pairs in a common fiber
/// whose R-values differ by a nontrivial d-th root of unity.
CollisionLocus compute_y_minus2(const PencilEndo& f);

struct SpecialSets {
    std::vector<P1> x_minus1, y_minus2, y_minus1;
    std::vector<P1> x_set, y_set, z_set, script_z;
    std::vector<P1> pre_z, pre2_z;  // f_inf^{-1}(Z), f_inf^{-2}(Z)
    double margin_r = 0.0;
    bool degenerate = false;
    double set_tol = 1e-7;
};

SpecialSets assemble_sets(const PencilEndo& f);

struct ConditionVerdict {
    bool cond1_disjoint = false;
    double cond1_margin = 0.0;
    bool cond2_chain = false;
    double cond2_margin = 0.0;
    bool cond2_simplified = false;
    double cond2_simplified_margin = 0.0;
    bool cond_53_relaxed = false;
    std::vector<P1> triple;  // f^-2(Z) ∩ f^-1(Z) ∩ Z
    double tolerance = 0.0;
    double gamma_hat = 0.0;
    double gamma_r = 0.0;
    double epsilon_max = 0.0;

    bool holds() const { return cond1_disjoint && cond2_chain; }
};

ConditionVerdict check_conditions(const SpecialSets& sets, const PencilEndo& f);

/// Normalized separation at one base line l; +inf when l is excluded from
/// both parts.
double gamma_at(const PencilEndo& f, const SpecialSets& sets, double r, const P1& l);

double estimate_gamma(const PencilEndo& f, const SpecialSets& sets, double r, int grid = 8192);

/// Solves eps * gamma = (4 eps beta / alpha)^d for eps.
double epsilon_max(double alpha_lo, double gamma_hat, int d, double beta = 1.0);

// Set helpers shared with the report and tests.
double distance_to_set(const P1& p, const std::vector<P1>& set);
std::vector<P1> dedupe(const std::vector<P1>& pts, double tol);
bool same_set(const std::vector<P1>& a, const std::vector<P1>& b, double tol, double* worst = nullptr);

}  // namespace attract
