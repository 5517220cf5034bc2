#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "attract/core.hpp"

namespace attract {

/// A point of P^N stored as its canonical lift: unit Euclidean norm, and the
/// first coordinate of maximal modulus real-positive.
template <std::size_t N>
class ProjPoint {
    static_assert(N >= 1 && N <= 3);

public:
    static constexpr std::size_t kDim = N;
    using Lift = std::array<cplx, N + 1>;

    explicit ProjPoint(const Lift& lift) : lift_(canonicalize(lift)) {}

    const Lift& lift() const noexcept { return lift_; }
    cplx operator[](std::size_t i) const { return lift_[i]; }

    /// max modulus over the first two coordinates (the pencil base part).
    double base_max() const { return std::max(std::abs(lift_[0]), std::abs(lift_[1])); }

    std::string str() const;

private:
    static Lift canonicalize(const Lift& in);

    Lift lift_;
};

using P1 = ProjPoint<1>;
using P2 = ProjPoint<2>;
using P3 = ProjPoint<3>;

inline P1 make_p1(cplx z, cplx w) { return P1({z, w}); }
inline P2 make_p2(cplx z, cplx w, cplx t) { return P2({z, w, t}); }
inline P3 make_p3(cplx z, cplx w, cplx t, cplx u) { return P3({z, w, t, u}); }

/// Fubini-Study chordal distance, sqrt(1 - |<p,q>|^2) on unit lifts; on P^1
/// this is |z w' - z' w|. Computed from 2x2 minors for accuracy near zero.
template <std::size_t N>
double chordal(const ProjPoint<N>& p, const ProjPoint<N>& q);

/// Same, for raw lifts of any scale.
double chordal_lift(std::span<const cplx> a, std::span<const cplx> b);

template <std::size_t N>
bool same_point(const ProjPoint<N>& p, const ProjPoint<N>& q, double tol) {
    return chordal(p, q) < tol;
}

/// Affine coordinate z/w of a P^1 point, or infinity.
cplx affine_ratio(const P1& p);

/// Stereographic-like chart used for renders: z/w inside the unit disc, and
/// the reflected w/z outside it.
struct ChartCoord {
    bool inverted;
    cplx value;
};

ChartCoord chart_coord(const P1& p);

// ---------------------------------------------------------------------------

template <std::size_t N>
typename ProjPoint<N>::Lift ProjPoint<N>::canonicalize(const Lift& in) {
    double norm2 = 0.0;
    double maxabs = 0.0;
    for (const auto& c : in) {
        if (!is_finite(c)) throw Error(ErrorKind::Degenerate, "non-finite projective coordinate");
        norm2 += std::norm(c);
        maxabs = std::max(maxabs, std::abs(c));
    }
    if (!(maxabs > 0.0)) throw Error(ErrorKind::Degenerate, "zero vector is not a projective point");
    // Rescale before squaring to avoid under/overflow.
    double s = 0.0;
    for (const auto& c : in) s += std::norm(c / maxabs);
    const double norm = maxabs * std::sqrt(s);
    std::size_t lead = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (std::abs(in[i]) >= maxabs * (1.0 - 1e-12)) {
            lead = i;
            break;
        }
    }
    const cplx phase = std::conj(in[lead]) / std::abs(in[lead]);
    Lift out{};
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * phase / norm;
    out[lead] = cplx(out[lead].real(), 0.0);
    return out;
}

template <std::size_t N>
double chordal(const ProjPoint<N>& p, const ProjPoint<N>& q) {
    return chordal_lift(p.lift(), q.lift());
}

template <std::size_t N>
std::string ProjPoint<N>::str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < lift_.size(); ++i) {
        if (i) s += ":";
        s += std::to_string(lift_[i].real());
        if (lift_[i].imag() != 0.0) s += (lift_[i].imag() < 0 ? "-" : "+") + std::to_string(std::abs(lift_[i].imag())) + "i";
    }
    return s + "]";
}

}  // namespace attract
