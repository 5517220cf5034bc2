#pragma once

#include <array>
#include <vector>

#include "attract/binary_form.hpp"

namespace attract {

/// f = [P : Q : t^d + eps R] on P^2. The lift F is fixed by the stored
/// coefficients times `lift_scale` (1 unless a gauge test changes it).
class PencilEndo {
public:
    PencilEndo(BinaryForm p, BinaryForm q, BinaryForm r, cplx epsilon, PrecisionProfile prec = {});

    const BinaryForm& P() const noexcept { return p_; }
    const BinaryForm& Q() const noexcept { return q_; }
    const BinaryForm& R() const noexcept { return r_; }
    cplx epsilon() const noexcept { return eps_; }
    int degree() const noexcept { return p_.degree(); }
    cplx lift_scale() const noexcept { return lift_scale_; }
    const PrecisionProfile& precision() const noexcept { return prec_; }

    PencilEndo with_epsilon(cplx eps) const;
    PencilEndo with_lift_scale(cplx lambda) const;
    PencilEndo with_precision(const PrecisionProfile& prec) const;

    /// F(z, w, t) on a raw lift.
    std::array<cplx, 3> lift_apply(cplx z, cplx w, cplx t) const;

private:
    BinaryForm p_, q_, r_;
    cplx eps_;
    cplx lift_scale_ = 1.0;
    PrecisionProfile prec_;
};

/// A base preimage p of a target lift (tz, tw), with lift (z, w) normalized
/// so that P(z, w) = tz and Q(z, w) = tw.
struct NormalizedFiberLift {
    P1 base;
    cplx z, w;
    cplx target_z, target_w;
    int multiplicity;
};

struct Preimage {
    P2 point;
    int multiplicity;
    // Lift with F(z, w, t) equal to the lift of the image it was computed from.
    cplx z, w, t;
};

struct PreimageResult {
    std::vector<Preimage> points;
    bool center_fiber = false;
};

P2 apply(const PencilEndo& f, const P2& x);
P1 base_apply(const PencilEndo& f, const P1& p);
P2 base_apply_aug(const PencilEndo& f, const P1& p);
P1 base_iterate(const PencilEndo& f, P1 p, int n);

std::vector<NormalizedFiberLift> base_preimages(const PencilEndo& f, const P1& q);
std::vector<NormalizedFiberLift> base_preimages_of_lift(const PencilEndo& f, cplx tz, cplx tw);

PreimageResult preimages(const PencilEndo& f, const P2& x);
/// Preimages of the raw lift (z, w, t), each carrying a lift that maps onto it.
PreimageResult preimages_of_lift(const PencilEndo& f, cplx z, cplx w, cplx t);

/// log ||F(x)|| on the unit lift of x.
double green_correction(const PencilEndo& f, const P2& x);

P2 iterate(const PencilEndo& f, P2 x, int n);

/// Principal d-th root.
inline cplx principal_root(cplx c, int d) {
    if (c == cplx(0.0)) return 0.0;
    return std::polar(std::pow(std::abs(c), 1.0 / d), std::arg(c) / d);
}

}  // namespace attract
