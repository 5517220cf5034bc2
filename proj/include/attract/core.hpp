#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace attract {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

inline bool is_finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

/// e^{2 i pi k / n}
inline cplx root_of_unity(int k, int n) {
    const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    return {std::cos(a), std::sin(a)};
}

enum class ErrorKind {
    NonConvergence,
    DegenerateFamily,
    Degenerate,
    TrappingFails,
    BudgetExceeded,
    DepthExceeded,
    PrerequisiteFailed,
    InsufficientData,
    ConfigInvalid,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Iteration budgets and tolerances shared by every numeric routine. A failed
/// certification can be re-run with `escalated()`.
struct PrecisionProfile {
    int root_max_iterations = 800;
    double root_step_tol = 1e-15;
    // Relative size below which an extreme coefficient counts as exactly zero
    // (root at [1:0] or [0:1]).
    double zero_coeff_tol = 1e-14;
    double cluster_tol = 1e-6;
    double backward_error_tol = 1e-12;
    // Two points of a special configuration are the same point below this.
    double point_tol = 1e-8;
    double degenerate_tol = 1e-9;
    double eliminant_trim_tol = 1e-10;

    PrecisionProfile escalated() const {
        PrecisionProfile p = *this;
        p.root_max_iterations *= 4;
        p.cluster_tol *= 0.1;
        p.point_tol *= 0.1;
        return p;
    }
};

}  // namespace attract
