#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "attract/binary_form.hpp"

namespace attract {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::DegenerateFamily: return "DegenerateFamily";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::TrappingFails: return "TrappingFails";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::DepthExceeded: return "DepthExceeded";
        case ErrorKind::PrerequisiteFailed: return "PrerequisiteFailed";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

double chordal_lift(std::span<const cplx> a, std::span<const cplx> b) {
    double ma = 0.0, mb = 0.0;
    for (auto c : a) ma = std::max(ma, std::abs(c));
    for (auto c : b) mb = std::max(mb, std::abs(c));
    double na = 0.0, nb = 0.0, wedge = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += std::norm(a[i] / ma);
        nb += std::norm(b[i] / mb);
        for (std::size_t j = i + 1; j < a.size(); ++j)
            wedge += std::norm((a[i] / ma) * (b[j] / mb) - (a[j] / ma) * (b[i] / mb));
    }
    return std::min(1.0, std::sqrt(wedge / (na * nb)));
}

double chordal_distance(const P1& p, const P1& q) { return chordal(p, q); }

cplx affine_ratio(const P1& p) {
    if (p[1] == cplx(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
    return p[0] / p[1];
}

ChartCoord chart_coord(const P1& p) {
    if (std::abs(p[0]) <= std::abs(p[1])) return {false, p[0] / p[1]};
    return {true, p[1] / p[0]};
}

// ---------------------------------------------------------------------------
// BinaryForm

BinaryForm::BinaryForm(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 2) throw Error(ErrorKind::ConfigInvalid, "binary form needs degree >= 1");
    for (auto c : coeffs_)
        if (!is_finite(c)) throw Error(ErrorKind::ConfigInvalid, "non-finite coefficient");
    if (is_zero()) throw Error(ErrorKind::Degenerate, "binary form is identically zero");
}

BinaryForm BinaryForm::unchecked(std::vector<cplx> coeffs) { return BinaryForm(std::move(coeffs), NoCheck{}); }

BinaryForm BinaryForm::monomial(int degree, int z_power, cplx c) {
    std::vector<cplx> v(static_cast<std::size_t>(degree) + 1, 0.0);
    v.at(static_cast<std::size_t>(z_power)) = c;
    return BinaryForm(std::move(v));
}

BinaryForm BinaryForm::from_roots(const std::vector<P1>& roots, cplx lead) {
    std::vector<cplx> acc{lead};
    for (const auto& r : roots) {
        // factor r_w z - r_z w
        std::vector<cplx> next(acc.size() + 1, 0.0);
        for (std::size_t j = 0; j < acc.size(); ++j) {
            next[j + 1] += acc[j] * r[1];
            next[j] -= acc[j] * r[0];
        }
        acc = std::move(next);
    }
    return BinaryForm(std::move(acc));
}

cplx BinaryForm::operator()(cplx z, cplx w) const {
    const int d = degree();
    if (std::abs(z) >= std::abs(w)) {
        if (z == cplx(0.0)) return 0.0;
        const cplx r = w / z;
        cplx acc = coeffs_[0];
        for (int j = 1; j <= d; ++j) acc = acc * r + coeffs_[static_cast<std::size_t>(j)];
        return acc * std::pow(z, d);
    }
    const cplx s = z / w;
    cplx acc = coeffs_[static_cast<std::size_t>(d)];
    for (int j = d - 1; j >= 0; --j) acc = acc * s + coeffs_[static_cast<std::size_t>(j)];
    return acc * std::pow(w, d);
}

BinaryForm BinaryForm::dz() const {
    const int d = degree();
    std::vector<cplx> v(static_cast<std::size_t>(std::max(d, 1)), 0.0);
    for (int k = 0; k < d; ++k) v[static_cast<std::size_t>(k)] = static_cast<double>(k + 1) * coeffs_[static_cast<std::size_t>(k + 1)];
    return unchecked(std::move(v));
}

BinaryForm BinaryForm::dw() const {
    const int d = degree();
    std::vector<cplx> v(static_cast<std::size_t>(std::max(d, 1)), 0.0);
    for (int k = 0; k < d; ++k) v[static_cast<std::size_t>(k)] = static_cast<double>(d - k) * coeffs_[static_cast<std::size_t>(k)];
    return unchecked(std::move(v));
}

double BinaryForm::norm1() const {
    double s = 0.0;
    for (auto c : coeffs_) s += std::abs(c);
    return s;
}

double BinaryForm::norm2() const {
    double s = 0.0;
    for (auto c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
}

bool BinaryForm::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx(0.0); });
}

BinaryForm BinaryForm::operator*(const BinaryForm& o) const {
    std::vector<cplx> v(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * o.coeffs_[j];
    return unchecked(std::move(v));
}

BinaryForm BinaryForm::operator+(const BinaryForm& o) const {
    if (o.degree() != degree()) throw Error(ErrorKind::ConfigInvalid, "degree mismatch in form sum");
    std::vector<cplx> v = coeffs_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.coeffs_[i];
    return unchecked(std::move(v));
}

BinaryForm BinaryForm::operator-(const BinaryForm& o) const { return *this + o.scaled(-1.0); }

BinaryForm BinaryForm::scaled(cplx s) const {
    std::vector<cplx> v = coeffs_;
    for (auto& c : v) c *= s;
    return unchecked(std::move(v));
}

BinaryForm BinaryForm::divide_linear(cplx a, cplx b, double* remainder) const {
    // F_j = a G_{j-1} + b G_j. Solve from whichever end keeps the recursion
    // contracting.
    const int d = degree();
    std::vector<cplx> g(static_cast<std::size_t>(d), 0.0);
    cplx rem;
    if (std::abs(a) >= std::abs(b)) {
        g[static_cast<std::size_t>(d - 1)] = coeffs_[static_cast<std::size_t>(d)] / a;
        for (int j = d - 1; j >= 1; --j)
            g[static_cast<std::size_t>(j - 1)] = (coeffs_[static_cast<std::size_t>(j)] - b * g[static_cast<std::size_t>(j)]) / a;
        rem = coeffs_[0] - b * g[0];
    } else {
        g[0] = coeffs_[0] / b;
        for (int j = 1; j <= d - 1; ++j)
            g[static_cast<std::size_t>(j)] = (coeffs_[static_cast<std::size_t>(j)] - a * g[static_cast<std::size_t>(j - 1)]) / b;
        rem = coeffs_[static_cast<std::size_t>(d)] - a * g[static_cast<std::size_t>(d - 1)];
    }
    if (remainder) {
        const double n = norm2();
        *remainder = n > 0.0 ? std::abs(rem) / n : 0.0;
    }
    return unchecked(std::move(g));
}

int total_multiplicity(const RootSet& roots) {
    int s = 0;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
}

// ---------------------------------------------------------------------------
// Roots

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Eval {
    cplx ratio;      // p / p'
    double resid;    // |p(x)| relative to the rounding bound
};

// a[k] multiplies x^k, degree m = a.size() - 1 >= 1, a[0] and a[m] nonzero.
Eval newton_ratio(const std::vector<cplx>& a, cplx x) {
    const int m = static_cast<int>(a.size()) - 1;
    if (std::abs(x) <= 1.0) {
        cplx p = a[static_cast<std::size_t>(m)], dp = 0.0;
        double bound = std::abs(p);
        const double ax = std::abs(x);
        for (int k = m - 1; k >= 0; --k) {
            dp = dp * x + p;
            p = p * x + a[static_cast<std::size_t>(k)];
            bound = bound * ax + std::abs(a[static_cast<std::size_t>(k)]);
        }
        return {dp == cplx(0.0) ? cplx(0.0) : p / dp, std::abs(p) / (bound * kEps)};
    }
    // Reversed polynomial q(y) = y^m p(1/y), y = 1/x.
    const cplx y = 1.0 / x;
    const double ay = std::abs(y);
    cplx q = a[0], dq = 0.0;
    double bound = std::abs(q);
    for (int k = 1; k <= m; ++k) {
        dq = dq * y + q;
        q = q * y + a[static_cast<std::size_t>(k)];
        bound = bound * ay + std::abs(a[static_cast<std::size_t>(k)]);
    }
    const cplx denom = static_cast<double>(m) - y * dq / q;
    const cplx ratio = (q == cplx(0.0) || denom == cplx(0.0)) ? cplx(0.0) : x / denom;
    return {ratio, std::abs(q) / (bound * kEps)};
}

std::vector<cplx> aberth(const std::vector<cplx>& a, const PrecisionProfile& prec) {
    const int m = static_cast<int>(a.size()) - 1;
    std::vector<cplx> x(static_cast<std::size_t>(m));
    if (m == 1) {
        x[0] = -a[0] / a[1];
        return x;
    }
    // Start on a circle whose radius is the geometric mean of the root moduli.
    const double radius = std::pow(std::abs(a[0]) / std::abs(a[static_cast<std::size_t>(m)]), 1.0 / m);
    for (int k = 0; k < m; ++k) x[static_cast<std::size_t>(k)] = std::polar(radius, 2.0 * kPi * k / m + 0.4);

    std::vector<char> done(static_cast<std::size_t>(m), 0);
    for (int it = 0; it < prec.root_max_iterations; ++it) {
        bool all = true;
        for (int i = 0; i < m; ++i) {
            auto& xi = x[static_cast<std::size_t>(i)];
            if (done[static_cast<std::size_t>(i)]) continue;
            const Eval e = newton_ratio(a, xi);
            if (e.resid <= 4.0 * m) {
                done[static_cast<std::size_t>(i)] = 1;
                continue;
            }
            cplx sum = 0.0;
            for (int j = 0; j < m; ++j)
                if (j != i) sum += 1.0 / (xi - x[static_cast<std::size_t>(j)]);
            const cplx step = e.ratio / (1.0 - e.ratio * sum);
            if (!is_finite(step)) continue;
            xi -= step;
            if (std::abs(step) <= prec.root_step_tol * std::max(1.0, std::abs(xi)))
                done[static_cast<std::size_t>(i)] = 1;
            else
                all = false;
        }
        if (all) return x;
    }
    throw Error(ErrorKind::NonConvergence, "root iteration did not converge for degree " + std::to_string(m));
}

double backward_error(const BinaryForm& f, const P1& p) { return std::abs(f(p)) / f.norm2(); }

}  // namespace

RootSet roots(const BinaryForm& f, const PrecisionProfile& prec) {
    const auto& c = f.coeffs();
    const int d = f.degree();
    double scale = 0.0;
    for (auto v : c) scale = std::max(scale, std::abs(v));
    if (!(scale > 0.0)) throw Error(ErrorKind::Degenerate, "roots of the zero form");
    const double thr = prec.zero_coeff_tol * scale;

    int hi = d;
    while (hi >= 0 && std::abs(c[static_cast<std::size_t>(hi)]) <= thr) --hi;
    int lo = 0;
    while (lo < hi && std::abs(c[static_cast<std::size_t>(lo)]) <= thr) ++lo;

    std::vector<P1> raw;
    for (int k = 0; k < d - hi; ++k) raw.push_back(make_p1(1.0, 0.0));
    for (int k = 0; k < lo; ++k) raw.push_back(make_p1(0.0, 1.0));
    if (hi - lo >= 1) {
        std::vector<cplx> a(c.begin() + lo, c.begin() + hi + 1);
        for (auto x : aberth(a, prec)) raw.push_back(make_p1(x, 1.0));
    }

    // Merge near-coincident roots; the centroid of a split multiple root is far
    // more accurate than any of its members.
    RootSet out;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        bool placed = false;
        for (std::size_t k = 0; k < members.size() && !placed; ++k) {
            for (auto j : members[k]) {
                if (chordal(raw[i], raw[j]) < prec.cluster_tol) {
                    members[k].push_back(i);
                    placed = true;
                    break;
                }
            }
        }
        if (!placed) members.push_back({i});
    }
    for (const auto& mem : members) {
        const P1& first = raw[mem.front()];
        const bool inverted = std::abs(first[0]) > std::abs(first[1]);
        cplx sum = 0.0;
        for (auto j : mem) sum += inverted ? raw[j][1] / raw[j][0] : raw[j][0] / raw[j][1];
        const cplx mean = sum / static_cast<double>(mem.size());
        P1 p = inverted ? make_p1(1.0, mean) : make_p1(mean, 1.0);
        if (mem.size() == 1) {
            // Homogeneous Newton in the same chart, kept only while it helps.
            const BinaryForm deriv = inverted ? f.dw() : f.dz();
            for (int it = 0; it < 3; ++it) {
                const double be = backward_error(f, p);
                if (be == 0.0) break;
                const cplx fp = f(p), dfp = deriv(p[0], p[1]);
                if (dfp == cplx(0.0)) break;
                const cplx delta = fp / dfp;
                P1 cand = inverted ? P1({p[0], p[1] - delta}) : P1({p[0] - delta, p[1]});
                if (backward_error(f, cand) < be)
                    p = cand;
                else
                    break;
            }
        } else {
            // A root of multiplicity m is a simple root of the (m-1)-th derivative.
            std::vector<cplx> poly(c.begin(), c.end());
            if (inverted) std::reverse(poly.begin(), poly.end());
            for (std::size_t k = 1; k < mem.size(); ++k) {
                for (std::size_t j = 1; j < poly.size(); ++j) poly[j - 1] = poly[j] * static_cast<double>(j);
                poly.pop_back();
            }
            auto horner = [](const std::vector<cplx>& a, cplx x, cplx& deriv) {
                cplx v = 0.0;
                deriv = 0.0;
                for (std::size_t j = a.size(); j-- > 0;) {
                    deriv = deriv * x + v;
                    v = v * x + a[j];
                }
                return v;
            };
            cplx x = mean, dv;
            double gx = std::abs(horner(poly, x, dv));
            for (int it = 0; it < 8 && gx > 0.0 && dv != cplx(0.0); ++it) {
                const cplx nx = x - horner(poly, x, dv) / dv;
                cplx nd;
                const double ng = std::abs(horner(poly, nx, nd));
                if (!(ng < gx) || std::abs(nx - mean) > prec.cluster_tol * (1.0 + std::abs(mean))) break;
                x = nx;
                gx = ng;
                dv = nd;
            }
            p = inverted ? make_p1(1.0, x) : make_p1(x, 1.0);
        }
        out.push_back({p, static_cast<int>(mem.size())});
    }

    for (const auto& r : out) {
        if (r.multiplicity == 1 && backward_error(f, r.point) > prec.backward_error_tol)
            throw Error(ErrorKind::NonConvergence, "root backward error too large at " + r.point.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Resultants and critical points

cplx determinant(std::vector<cplx> a, int n) {
    cplx det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a[static_cast<std::size_t>(col * n + col)]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(a[static_cast<std::size_t>(r * n + col)]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int k = 0; k < n; ++k)
                std::swap(a[static_cast<std::size_t>(piv * n + k)], a[static_cast<std::size_t>(col * n + k)]);
            det = -det;
        }
        const cplx pv = a[static_cast<std::size_t>(col * n + col)];
        det *= pv;
        for (int r = col + 1; r < n; ++r) {
            const cplx factor = a[static_cast<std::size_t>(r * n + col)] / pv;
            if (factor == cplx(0.0)) continue;
            for (int k = col; k < n; ++k)
                a[static_cast<std::size_t>(r * n + k)] -= factor * a[static_cast<std::size_t>(col * n + k)];
        }
    }
    return det;
}

cplx resultant(const BinaryForm& p, const BinaryForm& q) {
    const int m = p.degree(), n = q.degree();
    const int size = m + n;
    std::vector<cplx> s(static_cast<std::size_t>(size * size), 0.0);
    // Rows hold coefficients in descending powers of z.
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) s[static_cast<std::size_t>(r * size + r + k)] = p.coeff(m - k);
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) s[static_cast<std::size_t>((n + r) * size + r + k)] = q.coeff(n - k);
    return determinant(std::move(s), size);
}

double relative_resultant(const BinaryForm& p, const BinaryForm& q) {
    const double scale = std::pow(p.norm2(), q.degree()) * std::pow(q.norm2(), p.degree());
    return scale > 0.0 ? std::abs(resultant(p, q)) / scale : 0.0;
}

BinaryForm jacobian_form(const BinaryForm& p, const BinaryForm& q) { return p.dz() * q.dw() - p.dw() * q.dz(); }

RootSet critical_points(const BinaryForm& p, const BinaryForm& q, const PrecisionProfile& prec) {
    const BinaryForm j = jacobian_form(p, q);
    if (j.is_zero()) throw Error(ErrorKind::DegenerateFamily, "Jacobian form vanishes identically");
    return roots(BinaryForm(j.coeffs()), prec);
}

// ---------------------------------------------------------------------------
// Sphere extrema

namespace {

struct Poly1 {
    std::vector<cplx> a;  // a[k] multiplies v^k

    cplx eval(cplx v) const {
        cplx acc = 0.0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * v + *it;
        return acc;
    }
    cplx deriv(cplx v) const {
        cplx acc = 0.0;
        for (std::size_t k = a.size() - 1; k >= 1; --k) acc = acc * v + static_cast<double>(k) * a[k];
        return acc;
    }
    // Bound on |second derivative| over the disc of radius `radius`.
    double second_bound(double radius) const {
        double s = 0.0;
        for (std::size_t k = 2; k < a.size(); ++k)
            s += static_cast<double>(k * (k - 1)) * std::abs(a[k]) * std::pow(radius, static_cast<double>(k - 2));
        return s;
    }
};

// Piece 0: F(1, v); piece 1: F(v, 1).
Poly1 restrict_form(const BinaryForm& f, int piece) {
    const int d = f.degree();
    Poly1 p;
    p.a.resize(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) p.a[static_cast<std::size_t>(k)] = piece == 0 ? f.coeff(d - k) : f.coeff(k);
    return p;
}

struct Cell {
    double lower;
    int piece;
    double cx, cy, h;
    bool operator>(const Cell& o) const { return lower > o.lower; }
};

}  // namespace

SphereExtrema sphere_extrema(const BinaryForm& p, const BinaryForm& q, const BinaryForm& r) {
    const std::array<std::array<Poly1, 2>, 2> pieces{{{restrict_form(p, 0), restrict_form(q, 0)},
                                                       {restrict_form(p, 1), restrict_form(q, 1)}}};
    double upper = std::numeric_limits<double>::infinity();

    auto bound_cell = [&](int piece, double cx, double cy, double h) -> double {
        const cplx c(cx, cy);
        const double delta = h * std::sqrt(2.0);
        const double ac = std::abs(c);
        if (ac - delta > 1.0) return std::numeric_limits<double>::infinity();
        const cplx probe = ac <= 1.0 ? c : c / ac;
        double best_lb = 0.0, probe_val = 0.0;
        for (const auto& g : pieces[static_cast<std::size_t>(piece)]) {
            const double v = std::abs(g.eval(c));
            const double lb = v - std::abs(g.deriv(c)) * delta - 0.5 * g.second_bound(ac + delta) * delta * delta;
            best_lb = std::max(best_lb, lb);
            probe_val = std::max(probe_val, std::abs(g.eval(probe)));
        }
        upper = std::min(upper, probe_val);
        return best_lb * (1.0 - 1e-12);
    };

    std::priority_queue<Cell, std::vector<Cell>, std::greater<>> heap;
    const int n0 = 32;
    const double h0 = 1.0 / n0;
    for (int piece = 0; piece < 2; ++piece)
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n0; ++j) {
                const double cx = -1.0 + (2 * i + 1) * h0, cy = -1.0 + (2 * j + 1) * h0;
                const double lb = bound_cell(piece, cx, cy, h0);
                if (std::isfinite(lb)) heap.push({lb, piece, cx, cy, h0});
            }

    double alpha_lo = 0.0;
    const long budget = 400000;
    long spent = 0;
    while (!heap.empty()) {
        const Cell top = heap.top();
        if (top.lower >= upper * (1.0 - 1e-4) || spent >= budget) {
            alpha_lo = top.lower;
            break;
        }
        heap.pop();
        const double h = top.h * 0.5;
        for (int dx = -1; dx <= 1; dx += 2)
            for (int dy = -1; dy <= 1; dy += 2) {
                const double cx = top.cx + dx * h, cy = top.cy + dy * h;
                const double lb = bound_cell(top.piece, cx, cy, h);
                ++spent;
                if (std::isfinite(lb)) heap.push({lb, top.piece, cx, cy, h});
            }
    }
    if (!(alpha_lo > 1e-9 * std::max(p.norm1(), q.norm1())))
        throw Error(ErrorKind::DegenerateFamily, "no positive lower bound for min max(|P|,|Q|) on the sphere");

    // |R| peaks on the torus |z| = |w| = 1 by the maximum principle.
    const Poly1 rr = restrict_form(r, 0);
    const int n = 4096;
    const double half = kPi / n;
    double m2 = 0.0;
    for (std::size_t k = 1; k < rr.a.size(); ++k) m2 += static_cast<double>(k * k) * std::abs(rr.a[k]);
    double beta_hi = 0.0, beta_seen = 0.0;
    for (int i = 0; i < n; ++i) {
        const double theta = (2 * i + 1) * half;
        const cplx v = std::polar(1.0, theta);
        const double val = std::abs(rr.eval(v));
        const double slope = std::abs(rr.deriv(v));  // |d/dtheta| = |v g'(v)| = |g'(v)|
        beta_seen = std::max(beta_seen, val);
        beta_hi = std::max(beta_hi, val + slope * half + 0.5 * m2 * half * half);
    }
    return {alpha_lo, beta_hi * (1.0 + 1e-12), upper, beta_seen};
}

}  // namespace attract
