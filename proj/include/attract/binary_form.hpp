#pragma once

#include <utility>
#include <vector>

#include "attract/core.hpp"
#include "attract/projective.hpp"

namespace attract {

/// Homogeneous polynomial of degree d in (z, w). coeffs[j] multiplies z^j w^(d-j).
class BinaryForm {
public:
    explicit BinaryForm(std::vector<cplx> coeffs);

    /// Allows the zero form; used for intermediate eliminant arithmetic only.
    static BinaryForm unchecked(std::vector<cplx> coeffs);
    static BinaryForm monomial(int degree, int z_power, cplx c = 1.0);
    /// Product of linear factors (r_z w - r_w z) over the given roots.
    static BinaryForm from_roots(const std::vector<P1>& roots, cplx lead = 1.0);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
    cplx coeff(int j) const { return coeffs_.at(static_cast<std::size_t>(j)); }

    cplx operator()(cplx z, cplx w) const;
    cplx operator()(const P1& p) const { return (*this)(p[0], p[1]); }

    BinaryForm dz() const;
    BinaryForm dw() const;

    double norm1() const;
    double norm2() const;
    bool is_zero() const;

    BinaryForm operator*(const BinaryForm& other) const;
    BinaryForm operator+(const BinaryForm& other) const;
    BinaryForm operator-(const BinaryForm& other) const;
    BinaryForm scaled(cplx s) const;

    /// F / (a z + b w), assuming the linear form divides F. The remainder is
    /// dropped; its relative size is returned through `remainder` if given.
    BinaryForm divide_linear(cplx a, cplx b, double* remainder = nullptr) const;

private:
    struct NoCheck {};
    BinaryForm(std::vector<cplx> coeffs, NoCheck) : coeffs_(std::move(coeffs)) {}

    std::vector<cplx> coeffs_;
};

struct RootEntry {
    P1 point;
    int multiplicity;
};

using RootSet = std::vector<RootEntry>;

int total_multiplicity(const RootSet& roots);

/// Chordal distance on P^1.
double chordal_distance(const P1& p, const P1& q);

/// All projective roots with multiplicity. Throws NonConvergence when the
/// simultaneous iteration stalls or the refined roots miss the backward-error
/// tolerance.
RootSet roots(const BinaryForm& f, const PrecisionProfile& prec = {});

/// Homogeneous Sylvester resultant (zero when both forms vanish at [1:0]).
cplx resultant(const BinaryForm& p, const BinaryForm& q);

/// Same, relative to the Hadamard-type scale norm2(p)^deg q * norm2(q)^deg p.
double relative_resultant(const BinaryForm& p, const BinaryForm& q);

BinaryForm jacobian_form(const BinaryForm& p, const BinaryForm& q);

RootSet critical_points(const BinaryForm& p, const BinaryForm& q, const PrecisionProfile& prec = {});

struct SphereExtrema {
    double alpha_lo;
    double beta_hi;
    // Best observed values; alpha_lo <= alpha_seen and beta_seen <= beta_hi.
    double alpha_seen;
    double beta_seen;
};

SphereExtrema sphere_extrema(const BinaryForm& p, const BinaryForm& q, const BinaryForm& r);

/// Determinant by LU with partial pivoting; the matrix is row-major n x n.
cplx determinant(std::vector<cplx> a, int n);

}  // namespace attract
