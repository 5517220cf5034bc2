#include "attract/kit.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace attract::kit {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) bad(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
            bad("unknown key '" + k + "' in " + where);
    }
}

// Decimal strings are the canonical form; plain JSON numbers are accepted too.
double number(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) bad(what + " must be a number or decimal string");
    const std::string s = j.get<std::string>();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) bad(what + ": cannot parse '" + s + "'");
    if (!std::isfinite(v)) bad(what + " must be finite");
    return v;
}

cplx complex_value(const json& j, const std::string& what) {
    if (j.is_array()) {
        if (j.size() != 2) bad(what + " must be [re, im]");
        return {number(j[0], what + ".re"), number(j[1], what + ".im")};
    }
    return number(j, what);
}

int integer(const json& j, const std::string& what, int lo, int hi) {
    const double v = number(j, what);
    if (v != std::floor(v) || v < lo || v > hi) bad(what + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

bool boolean(const json& j, const std::string& what) {
    if (!j.is_boolean()) bad(what + " must be true or false");
    return j.get<bool>();
}

std::vector<cplx> form_coeffs(const json& j, int d, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != d + 1)
        bad(what + " needs degree + 1 = " + std::to_string(d + 1) + " coefficients");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_value(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

P1 p1_value(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2) bad(what + " must be [[re, im], [re, im]]");
    const cplx z = complex_value(j[0], what), w = complex_value(j[1], what);
    if (z == cplx(0.0) && w == cplx(0.0)) bad(what + " is not a projective point");
    return P1({z, w});
}

GridAxis axis(const json& j, const std::string& what) {
    allow_keys(j, what, {"from", "to", "count"});
    GridAxis a;
    if (j.contains("from")) a.from = complex_value(j["from"], what + ".from");
    if (j.contains("to")) a.to = complex_value(j["to"], what + ".to");
    if (j.contains("count")) a.count = integer(j["count"], what + ".count", 1, 100000);
    return a;
}


json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Stopwatch {
public:
    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        laps_[stage] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    json to_json() const {
        json j = json::object();
        double total = 0.0;
        for (const auto& [k, v] : laps_.items()) {
            j[k] = v;
            total += v.get<double>();
        }
        j["total"] = total;
        return json{{"seconds", j}};
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    json laps_ = json::object();
};

json header(const RunConfig& cfg, const std::string& sub) {
    json r;
    r["schema"] = kReportSchema;
    r["subcommand"] = sub;
    r["name"] = cfg.name;
    r["config"] = cfg.raw;
    r["effective"] = {{"seed", cfg.seed},
                      {"budget", cfg.budget},
                      {"certificateSamples", cfg.degree_samples},
                      {"sliceDepth", cfg.slice_depth},
                      {"p3Samples", cfg.p3.samples},
                      {"p3SliceDepth", cfg.p3.slice_depth}};
    return r;
}

json failure(const std::string& stage, const Error& e) {
    return {{"stage", stage}, {"kind", to_string(e.kind())}, {"message", e.what()}};
}

std::string status_for(int code) {
    switch (code) {
        case kPass: return "pass";
        case kCertificationFail: return "certification-failed";
        case kDegenerateInput: return "degenerate-input";
        case kBudget: return "budget-exceeded";
        default: return "config-invalid";
    }
}

void finish(json& rep, int code, const Stopwatch& sw) {
    rep["status"] = status_for(code);
    rep["exitCode"] = code;
    rep["timing"] = sw.to_json();
}

json extrema_json(const SphereExtrema& ex) {
    return {{"alphaLo", ex.alpha_lo}, {"betaHi", ex.beta_hi}, {"alphaSeen", ex.alpha_seen}, {"betaSeen", ex.beta_seen}};
}

json sets_json(const SpecialSets& s, const ConditionVerdict& v) {
    return {{"X", points_json(s.x_set)},
            {"Y", points_json(s.y_set)},
            {"Z", points_json(s.z_set)},
            {"scriptZ", points_json(s.script_z)},
            {"marginR", s.margin_r},
            {"cond1", v.cond1_disjoint},
            {"cond2", v.cond2_chain},
            {"cond2simplified", v.cond2_simplified},
            {"gammaHat", num(v.gamma_hat)},
            {"epsilonMax", num(v.epsilon_max)},
            {"Xminus1", points_json(s.x_minus1)},
            {"Yminus2", points_json(s.y_minus2)},
            {"preZ", points_json(s.pre_z)},
            {"pre2Z", points_json(s.pre2_z)},
            {"triple", points_json(v.triple)},
            {"cond1Margin", v.cond1_margin},
            {"cond2Margin", v.cond2_margin},
            {"cond2simplifiedMargin", v.cond2_simplified_margin},
            {"cond53Relaxed", v.cond_53_relaxed},
            {"gammaR", v.gamma_r},
            {"degenerate", s.degenerate},
            {"tolerance", {{"pointChordal", v.tolerance}, {"setChordal", s.set_tol}}}};
}

json trapping_json(const TrappingCertificate& c) {
    return {{"alphaLo", c.alpha_lo},
            {"betaHi", c.beta_hi},
            {"epsilon", cplx_json(c.epsilon_used)},
            {"rho", c.rho},
            {"inequalitySlack", c.inequality_slack},
            {"predictedDelta", c.predicted_delta},
            {"sampledDelta", c.sampled_delta},
            {"samples", c.samples},
            {"ok", c.sampled_ok && c.inequality_slack > 0.0},
            {"tolerance", {{"slack", "> 0 in double arithmetic"}, {"sampledDelta", "> 0"}}}};
}

json degree_json(const DegreeCertificate& c) {
    return {{"m", c.iterate_m},
            {"samples", c.samples},
            {"maxCount", c.max_count},
            {"threshold", c.threshold},
            {"verdict", c.verdict},
            {"worstPoint", point_json(c.worst_point)},
            {"dtOneStep", c.dt_one_step},
            {"minCount", c.min_count},
            {"meanCount", c.mean_count},
            {"maxCountPruned", c.max_count_pruned},
            {"maxDistinct", c.max_distinct},
            {"resampled", c.resampled},
            {"tolerance", {{"maxCount", "< threshold"}, {"minCount", ">= 1 expected; 0 flags conditioning loss"}}}};
}

json trace_json(const PotentialTrace& t, const TraceOptions& o) {
    json spreads = json::array();
    for (const auto& [n, v] : t.spreads) spreads.push_back({n, num(v)});
    return {{"spreads", spreads},
            {"verdict", to_string(t.verdict)},
            {"predictedContraction", t.predicted_contraction},
            {"predictedContractionM", t.predicted_contraction_m},
            {"dtOneStep", t.dt_one_step},
            {"cHat", t.c_hat},
            {"plateauBound", num(t.plateau_bound)},
            {"resampled", t.resampled},
            {"nMax", o.n_max},
            {"samples", o.samples},
            {"shrinkRadius", o.shrink_radius},
            {"tolerance", {{"plateauRel", o.plateau_rel}, {"plateauRun", o.plateau_run}}}};
}

json horizontal_json(const HorizontalLikeReport& h, const Box& b) {
    return {{"box", {{"inner", b.inner}, {"outer", b.outer}, {"rho", b.rho}}},
            {"verticalOk", h.vertical_ok},
            {"verticalMargin", h.vertical_margin},
            {"verticalWitness", point_json(h.vertical_witness)},
            {"horizontalOk", h.horizontal_ok},
            {"horizontalMargin", h.horizontal_margin},
            {"horizontalWitness", point_json(h.horizontal_witness)},
            {"baseOk", h.base_ok},
            {"baseMargin", h.base_margin},
            {"boundarySamples", h.boundary_samples},
            {"injectivitySamples", h.injectivity_samples},
            {"minPreimages", h.min_preimages},
            {"maxPreimages", h.max_preimages},
            {"horizontalLike", h.horizontal_like()},
            {"henonLike", h.henon_like()},
            {"tolerance", {{"margins", "> 0"}, {"preimages", "<= 1"}}}};
}

json boxcount_json(const BoxCounting& b) {
    json counts = json::array();
    for (const auto& [s, n] : b.counts) counts.push_back({s, n});
    return {{"slope", b.slope}, {"intercept", b.intercept}, {"residualRms", b.residual_rms}, {"counts", counts}};
}

// Conditions and the epsilon rule shared by analyze, certify and friends.
struct SetStage {
    SphereExtrema ex{};
    SpecialSets sets;
    ConditionVerdict verdict;
    cplx epsilon = 0.0;
};

SetStage run_sets(const RunConfig& cfg, json& rep) {
    SetStage st;
    const PencilEndo f0 = cfg.map(cfg.epsilon_auto ? cplx(cfg.epsilon_cap) : cfg.epsilon);
    st.ex = sphere_extrema(f0.P(), f0.Q(), f0.R());
    rep["extrema"] = extrema_json(st.ex);
    st.sets = assemble_sets(f0);
    st.verdict = check_conditions(st.sets, f0);
    if (!st.sets.degenerate) {
        st.verdict.gamma_r = 0.5 * st.sets.margin_r;
        st.verdict.gamma_hat = estimate_gamma(f0, st.sets, st.verdict.gamma_r);
        st.verdict.epsilon_max = epsilon_max(st.ex.alpha_lo, st.verdict.gamma_hat, f0.degree(), st.ex.beta_hi);
    }
    rep["sets"] = sets_json(st.sets, st.verdict);
    const double em = st.verdict.epsilon_max;
    json e;
    if (cfg.epsilon_auto) {
        // Without a usable bound (degenerate sets) the cap alone is used.
        const bool usable = std::isfinite(em) && em > 0.0;
        st.epsilon = usable ? std::min(0.5 * em, cfg.epsilon_cap) : cfg.epsilon_cap;
        e["rule"] = usable ? "min(epsilonMax/2, cap)" : "cap (no epsilonMax available)";
    } else {
        st.epsilon = cfg.epsilon;
        e["rule"] = "configured";
    }
    e["value"] = cplx_json(st.epsilon);
    e["cap"] = cfg.epsilon_cap;
    e["belowEpsilonMax"] = std::isfinite(em) && em > 0.0 && std::abs(st.epsilon) < em;
    rep["epsilon"] = e;
    return st;
}

cplx resolve_epsilon(const RunConfig& cfg, json& rep) {
    if (!cfg.epsilon_auto) {
        rep["epsilon"] = {{"rule", "configured"}, {"value", cplx_json(cfg.epsilon)}};
        return cfg.epsilon;
    }
    return run_sets(cfg, rep).epsilon;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Outcome pipeline(const RunConfig& cfg, const std::string& sub, bool degree, bool trace) {
    Outcome out;
    json rep = header(cfg, sub);
    Stopwatch sw;
    std::string stage = "sets";
    int code = kPass;
    json failures = json::array();
    try {
        const SetStage st = run_sets(cfg, rep);
        sw.lap("sets");
        const PencilEndo f = cfg.map(st.epsilon);

        stage = "trapping";
        const TrappingCertificate tc = certify_trapping(f, st.ex, cfg.trapping_samples, cfg.seed);
        rep["trapping"] = trapping_json(tc);
        sw.lap("trapping");
        bool certified = tc.sampled_ok;

        if (degree) {
            stage = "certificate";
            const DegreeCertificate dc = certify_degree(f, tc.rho, cfg.degree_m, cfg.degree_samples, cfg.seed);
            rep["certificate"] = degree_json(dc);
            certified = certified && dc.verdict;
            sw.lap("certificate");
        }
        if (trace && cfg.run_potential) {
            stage = "potential";
            TraceOptions o = cfg.trace;
            o.seed = cfg.seed;
            rep["potential"] = trace_json(potential_trace(f, tc.rho, o), o);
            sw.lap("potential");
        }
        if (sub == "analyze") {
            stage = "attractor";
            out.artifacts.push_back(
                {"clouds/attractor.csv", cloud_csv(sample_attractor(f, tc.rho, 50, cfg.attractor_points, cfg.seed))});
            sw.lap("attractor");
        }
        code = st.sets.degenerate ? kDegenerateInput : (certified ? kPass : kCertificationFail);
        rep["verdict"] = {{"conditionsHold", st.verdict.holds()},
                          {"conditionsSimplifiedHold", st.verdict.cond1_disjoint && st.verdict.cond2_simplified},
                          {"setsDegenerate", st.sets.degenerate},
                          {"trapping", tc.sampled_ok},
                          {"smallTopologicalDegree", degree ? json(rep["certificate"]["verdict"]) : json(nullptr)}};
    } catch (const Error& e) {
        failures.push_back(failure(stage, e));
        code = exit_code_for(e.kind());
    }
    rep["failures"] = failures;
    finish(rep, code, sw);
    out.report = std::move(rep);
    out.exit_code = code;
    return out;
}

PencilEndo scan_map(const ScanOptions& s, cplx a, cplx b) {
    const int d = s.family == "swap" ? 2 : s.degree;
    std::vector<cplx> p(d + 1, 0.0), q(d + 1, 0.0), r(d + 1, 0.0);
    p[0] = 1.0;
    p[d] = a;
    q[0] = b;
    q[d] = 1.0;
    if (s.family == "swap") {
        r = {1.0, 2.0, 1.0};  // (z + w)^2
    } else {
        r[d] = 1.0;
        r[d - 1] = 1.0;  // z^d + z^{d-1} w
    }
    return PencilEndo(BinaryForm(p), BinaryForm(q), BinaryForm(r), 1e-3);
}

// f_inf is conjugate to z^{+-d} exactly when its two fully ramified critical
// points form an invariant pair; such cells sit in the power-map family.
bool exceptional_base(const PencilEndo& f) {
    const RootSet crit = critical_points(f.P(), f.Q(), f.precision());
    std::vector<P1> full;
    for (const auto& c : crit)
        if (c.multiplicity == f.degree() - 1) full.push_back(c.point);
    if (full.size() != 2) return false;
    return same_set({base_apply(f, full[0]), base_apply(f, full[1])}, full, 1e-9);
}

struct ScanCell {
    cplx a, b;
    std::string status;
    bool cond1 = false, cond2 = false, cond2s = false;
    double m1 = 0.0, m2 = 0.0, m2s = 0.0;
};

std::vector<ScanCell> run_scan(const ScanOptions& s) {
    const long cells = s.diagonal ? s.a.count : static_cast<long>(s.a.count) * s.b.count;
    if (cells > s.max_cells) throw Error(ErrorKind::BudgetExceeded, "scan has " + std::to_string(cells) + " cells");
    std::vector<ScanCell> out;
    for (int i = 0; i < s.a.count; ++i) {
        for (int j = 0; j < (s.diagonal ? 1 : s.b.count); ++j) {
            ScanCell c{s.a.at(i), s.diagonal ? s.a.at(i) : s.b.at(j), "", false, false, false, 0.0, 0.0, 0.0};
            try {
                const PencilEndo f = scan_map(s, c.a, c.b);
                const SpecialSets sets = assemble_sets(f);
                const ConditionVerdict v = check_conditions(sets, f);
                c.cond1 = v.cond1_disjoint;
                c.cond2 = v.cond2_chain;
                c.cond2s = v.cond2_simplified;
                c.m1 = v.cond1_margin;
                c.m2 = v.cond2_margin;
                c.m2s = v.cond2_simplified_margin;
                c.status = sets.degenerate || exceptional_base(f) ? "degenerate" : (v.holds() ? "pass" : "fail");
            } catch (const Error& e) {
                c.status = e.kind() == ErrorKind::Degenerate || e.kind() == ErrorKind::DegenerateFamily
                               ? "degenerate"
                               : std::string("error:") + to_string(e.kind());
            }
            out.push_back(c);
        }
    }
    return out;
}

// Raster helpers.
struct Canvas {
    Image img;
    Canvas(int w, int h, std::uint8_t bg) {
        img.width = w;
        img.height = h;
        img.rgb.assign(static_cast<std::size_t>(w) * h * 3, bg);
    }
    void put(int x, int y, std::array<std::uint8_t, 3> c) {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
        const std::size_t k = (static_cast<std::size_t>(y) * img.width + x) * 3;
        img.rgb[k] = c[0];
        img.rgb[k + 1] = c[1];
        img.rgb[k + 2] = c[2];
    }
    void disc(double cx, double cy, double r, std::array<std::uint8_t, 3> c) {
        for (int y = static_cast<int>(std::floor(cy - r)); y <= static_cast<int>(std::ceil(cy + r)); ++y)
            for (int x = static_cast<int>(std::floor(cx - r)); x <= static_cast<int>(std::ceil(cx + r)); ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) put(x, y, c);
    }
    void circle(double cx, double cy, double r, std::array<std::uint8_t, 3> c) {
        const int n = std::max(16, static_cast<int>(8 * r));
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * kPi * k / n;
            put(static_cast<int>(std::lround(cx + r * std::cos(a))), static_cast<int>(std::lround(cy + r * std::sin(a))), c);
        }
    }
};

using Rgb = std::array<std::uint8_t, 3>;
constexpr Rgb kWhite{255, 255, 255}, kGrey{200, 200, 200}, kRed{220, 40, 40}, kBlue{40, 80, 220}, kGreen{30, 160, 60},
    kMagenta{190, 40, 190}, kOrange{240, 150, 20}, kBlack{0, 0, 0};

Outcome render_sphere_sets(const RunConfig& cfg, json& rep) {
    const SetStage st = run_sets(cfg, rep);
    const int s = cfg.render.size;
    Canvas cv(2 * s, s, 255);
    const double rad = 0.45 * s;
    // Left disc: z/w with |z/w| <= 1. Right disc: w/z.
    for (int half = 0; half < 2; ++half) cv.circle(s * half + 0.5 * s, 0.5 * s, rad, kGrey);
    int drawn = 0;
    const auto place = [&](const P1& p, double pix, Rgb c, bool ring) {
        const ChartCoord cc = chart_coord(p);
        const double cx = s * (cc.inverted ? 1.5 : 0.5) + rad * cc.value.real();
        const double cy = 0.5 * s - rad * cc.value.imag();
        if (ring) {
            // Chordal radius r is about r (1 + |v|^2) in the affine chart.
            cv.circle(cx, cy, std::max(2.0, rad * st.sets.margin_r * (1.0 + std::norm(cc.value))), c);
        } else {
            cv.disc(cx, cy, pix, c);
        }
        ++drawn;
    };
    json counts;
    const auto layer = [&](const std::vector<P1>& pts, const char* key, double pix, Rgb c) {
        for (const auto& p : pts) place(p, pix, c, false);
        counts[key] = pts.size();
    };
    for (const auto& p : st.sets.z_set) place(p, 0, kGrey, true);
    layer(st.sets.pre_z, "preZ", 2.5, kGreen);
    layer(st.sets.x_set, "X", 4.0, kRed);
    layer(st.sets.y_set, "Y", 4.0, kBlue);
    layer(st.sets.script_z, "scriptZ", 2.0, kMagenta);
    counts["Z"] = st.sets.z_set.size();
    rep["render"] = {{"kind", "sphere-sets"}, {"width", cv.img.width}, {"height", cv.img.height}, {"drawn", counts}};
    Outcome out;
    out.artifacts.push_back({"renders/sphere-sets.ppm", cv.img.ppm()});
    return out;
}

Outcome render_fiber_slice(const RunConfig& cfg, json& rep) {
    const cplx eps = resolve_epsilon(cfg, rep);
    const PencilEndo f = cfg.map(eps);
    const int depth = std::min(cfg.slice_depth, 12);
    std::vector<std::pair<int, cplx>> pts;
    for (int k = 1; k <= depth; ++k)
        for (const auto& x : solenoid_points(f, cfg.slice_base, k, cfg.budget)) pts.emplace_back(k, fiber_coordinate(cfg.slice_base, x));
    double span = 0.0;
    cplx centre = 0.0;
    for (const auto& [k, s] : pts) centre += s / static_cast<double>(pts.size());
    for (const auto& [k, s] : pts) span = std::max(span, std::abs(s - centre));
    const int sz = cfg.render.size;
    Canvas cv(sz, sz, 255);
    std::set<std::pair<int, int>> pixels;
    for (const auto& [k, s] : pts) {
        const cplx v = span > 0.0 ? (s - centre) / span : cplx(0.0);
        const int x = static_cast<int>(std::lround(0.5 * sz + 0.45 * sz * v.real()));
        const int y = static_cast<int>(std::lround(0.5 * sz - 0.45 * sz * v.imag()));
        const auto shade = static_cast<std::uint8_t>(200 - 180 * k / std::max(depth, 1));
        cv.put(x, y, {shade, shade, static_cast<std::uint8_t>(255 - shade / 2)});
        pixels.emplace(x, y);
    }
    rep["render"] = {{"kind", "fiber-slice"},
                     {"width", sz},
                     {"height", sz},
                     {"depth", depth},
                     {"base", point_json(cfg.slice_base)},
                     {"points", pts.size()},
                     {"distinctPixels", pixels.size()},
                     {"span", span}};
    Outcome out;
    out.artifacts.push_back({"renders/fiber-slice.ppm", cv.img.ppm()});
    return out;
}

Outcome render_scan_heatmap(const RunConfig& cfg, json& rep) {
    const auto cells = run_scan(cfg.scan);
    const int cols = cfg.scan.diagonal ? cfg.scan.a.count : cfg.scan.b.count;
    const int rows = cfg.scan.diagonal ? 1 : cfg.scan.a.count;
    const int cell = std::max(1, cfg.render.size / std::max(rows, cols));
    Canvas cv(cols * cell, rows * cell, 255);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const int i = static_cast<int>(k) / cols, j = static_cast<int>(k) % cols;
        const auto& c = cells[k];
        Rgb colour = c.status == "pass" ? kGreen : c.status == "fail" ? kOrange : c.status == "degenerate" ? kBlack : kRed;
        for (int y = 0; y < cell; ++y)
            for (int x = 0; x < cell; ++x) cv.put(j * cell + x, (rows - 1 - i) * cell + y, colour);
    }
    rep["render"] = {{"kind", "scan-heatmap"}, {"width", cv.img.width}, {"height", cv.img.height}, {"cells", cells.size()}};
    Outcome out;
    out.artifacts.push_back({"renders/scan-heatmap.ppm", cv.img.ppm()});
    return out;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ConfigInvalid:
        case ErrorKind::InsufficientData: return kConfigError;
        case ErrorKind::BudgetExceeded:
        case ErrorKind::DepthExceeded: return kBudget;
        case ErrorKind::Degenerate:
        case ErrorKind::DegenerateFamily: return kDegenerateInput;
        case ErrorKind::NonConvergence:
        case ErrorKind::TrappingFails:
        case ErrorKind::PrerequisiteFailed: return kCertificationFail;
    }
    return kCertificationFail;
}

PrecisionProfile RunConfig::precision() const {
    PrecisionProfile p;
    for (int i = 0; i < escalate; ++i) p = p.escalated();
    return p;
}

PencilEndo RunConfig::map(cplx eps) const {
    if (degree < 1 || P.empty() || Q.empty() || R.empty()) bad("this subcommand needs degree, P, Q and R");
    return PencilEndo(BinaryForm(P), BinaryForm(Q), BinaryForm(R), eps, precision());
}

RunConfig parse_config(const json& j) {
    allow_keys(j, "config", {"schema", "name", "seed", "degree", "P", "Q", "R", "epsilon", "epsilonCap", "precision",
                             "budget", "trapping", "certificate", "potential", "slice", "attractor", "scan", "p3", "render"});
    RunConfig c;
    c.raw = j;
    if (j.contains("schema") && j["schema"] != kConfigSchema) bad(std::string("schema must be ") + kConfigSchema);
    if (j.contains("name")) {
        if (!j["name"].is_string()) bad("name must be a string");
        c.name = j["name"].get<std::string>();
    }
    if (!j.contains("seed")) bad("seed is required");
    {
        const double s = number(j["seed"], "seed");
        if (s < 0 || s != std::floor(s) || s > 9007199254740992.0) bad("seed must be a non-negative integer");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("degree")) c.degree = integer(j["degree"], "degree", 1, 64);
    for (const char* k : {"P", "Q", "R"}) {
        if (!j.contains(k)) continue;
        if (c.degree < 1) bad("degree must be given with the forms");
        auto& dst = std::string(k) == "P" ? c.P : std::string(k) == "Q" ? c.Q : c.R;
        dst = form_coeffs(j[k], c.degree, k);
    }
    if (j.contains("epsilon")) {
        const json& e = j["epsilon"];
        if (e.is_string() && e.get<std::string>() == "auto") {
            c.epsilon_auto = true;
        } else {
            c.epsilon_auto = false;
            c.epsilon = complex_value(e, "epsilon");
        }
    }
    if (j.contains("epsilonCap")) c.epsilon_cap = number(j["epsilonCap"], "epsilonCap");
    if (!(c.epsilon_cap > 0.0)) bad("epsilonCap must be positive");
    if (j.contains("precision")) {
        allow_keys(j["precision"], "precision", {"escalate"});
        if (j["precision"].contains("escalate")) c.escalate = integer(j["precision"]["escalate"], "precision.escalate", 0, 4);
    }
    if (j.contains("budget")) c.budget = number(j["budget"], "budget");
    if (!(c.budget >= 1.0)) bad("budget must be at least 1");
    if (j.contains("trapping")) {
        allow_keys(j["trapping"], "trapping", {"samples"});
        if (j["trapping"].contains("samples")) c.trapping_samples = integer(j["trapping"]["samples"], "trapping.samples", 1, 10000000);
    }
    if (j.contains("certificate")) {
        const json& d = j["certificate"];
        allow_keys(d, "certificate", {"m", "samples"});
        if (d.contains("m")) c.degree_m = integer(d["m"], "certificate.m", 1, 12);
        if (d.contains("samples")) c.degree_samples = integer(d["samples"], "certificate.samples", 1, 10000000);
    }
    if (j.contains("potential")) {
        const json& p = j["potential"];
        allow_keys(p, "potential", {"enabled", "nMax", "samples", "plateauRel", "plateauRun", "degreeSamples", "shrinkRadius", "rho"});
        if (p.contains("enabled")) c.run_potential = boolean(p["enabled"], "potential.enabled");
        if (p.contains("nMax")) c.trace.n_max = integer(p["nMax"], "potential.nMax", 1, 12);
        if (p.contains("samples")) c.trace.samples = integer(p["samples"], "potential.samples", 2, 100000);
        if (p.contains("plateauRel")) c.trace.plateau_rel = number(p["plateauRel"], "potential.plateauRel");
        if (p.contains("plateauRun")) c.trace.plateau_run = integer(p["plateauRun"], "potential.plateauRun", 1, 12);
        if (p.contains("degreeSamples")) c.trace.degree_samples = integer(p["degreeSamples"], "potential.degreeSamples", 1, 1000000);
        if (p.contains("shrinkRadius")) c.trace.shrink_radius = boolean(p["shrinkRadius"], "potential.shrinkRadius");
        if (p.contains("rho")) c.potential_rho = number(p["rho"], "potential.rho");
    }
    if (j.contains("slice")) {
        allow_keys(j["slice"], "slice", {"base", "depth"});
        if (j["slice"].contains("base")) c.slice_base = p1_value(j["slice"]["base"], "slice.base");
        if (j["slice"].contains("depth")) c.slice_depth = integer(j["slice"]["depth"], "slice.depth", 1, 40);
    }
    if (j.contains("attractor")) {
        allow_keys(j["attractor"], "attractor", {"points"});
        if (j["attractor"].contains("points")) c.attractor_points = integer(j["attractor"]["points"], "attractor.points", 0, 10000000);
    }
    if (j.contains("scan")) {
        const json& s = j["scan"];
        allow_keys(s, "scan", {"family", "degree", "a", "b", "diagonal", "maxCells"});
        if (s.contains("family")) {
            if (!s["family"].is_string()) bad("scan.family must be a string");
            c.scan.family = s["family"].get<std::string>();
            if (c.scan.family != "powers" && c.scan.family != "swap") bad("scan.family must be powers or swap");
        }
        if (s.contains("degree")) c.scan.degree = integer(s["degree"], "scan.degree", 2, 12);
        if (s.contains("a")) c.scan.a = axis(s["a"], "scan.a");
        if (s.contains("b")) c.scan.b = axis(s["b"], "scan.b");
        if (s.contains("diagonal")) c.scan.diagonal = boolean(s["diagonal"], "scan.diagonal");
        if (s.contains("maxCells")) c.scan.max_cells = integer(s["maxCells"], "scan.maxCells", 1, 10000000);
    }
    if (j.contains("p3")) {
        const json& p = j["p3"];
        allow_keys(p, "p3", {"variant", "eps1", "eps2", "c", "m", "samples", "trappingSamples", "residualSamples", "box",
                             "boundarySamples", "injectivitySamples", "sliceDepth", "decades", "scales", "sliceBase"});
        if (p.contains("variant")) {
            if (!p["variant"].is_string()) bad("p3.variant must be a string");
            c.p3.variant = p["variant"].get<std::string>();
            if (c.p3.variant != "hyperplane" && c.p3.variant != "product") bad("p3.variant must be hyperplane or product");
        }
        if (p.contains("eps1")) c.p3.eps1 = complex_value(p["eps1"], "p3.eps1");
        if (p.contains("eps2")) c.p3.eps2 = complex_value(p["eps2"], "p3.eps2");
        if (p.contains("c")) c.p3.c = number(p["c"], "p3.c");
        if (p.contains("m")) c.p3.m = integer(p["m"], "p3.m", 1, 11);
        if (p.contains("samples")) c.p3.samples = integer(p["samples"], "p3.samples", 1, 1000000);
        if (p.contains("trappingSamples")) c.p3.trapping_samples = integer(p["trappingSamples"], "p3.trappingSamples", 1, 10000000);
        if (p.contains("residualSamples")) c.p3.residual_samples = integer(p["residualSamples"], "p3.residualSamples", 1, 10000000);
        if (p.contains("box")) {
            allow_keys(p["box"], "p3.box", {"inner", "outer"});
            if (p["box"].contains("inner")) c.p3.box.inner = number(p["box"]["inner"], "p3.box.inner");
            if (p["box"].contains("outer")) c.p3.box.outer = number(p["box"]["outer"], "p3.box.outer");
            if (!(c.p3.box.inner > 0.0 && c.p3.box.inner < 1.0 && c.p3.box.outer > 1.0)) bad("p3.box needs 0 < inner < 1 < outer");
        }
        if (p.contains("boundarySamples")) c.p3.boundary_samples = integer(p["boundarySamples"], "p3.boundarySamples", 1, 10000000);
        if (p.contains("injectivitySamples")) c.p3.injectivity_samples = integer(p["injectivitySamples"], "p3.injectivitySamples", 0, 10000000);
        if (p.contains("sliceDepth")) c.p3.slice_depth = integer(p["sliceDepth"], "p3.sliceDepth", 1, 20);
        if (p.contains("decades")) c.p3.decades = number(p["decades"], "p3.decades");
        if (p.contains("scales")) c.p3.scales = integer(p["scales"], "p3.scales", 2, 1000);
        if (p.contains("sliceBase")) c.p3.slice_base = p1_value(p["sliceBase"], "p3.sliceBase");
    }
    if (j.contains("render")) {
        allow_keys(j["render"], "render", {"kind", "size"});
        if (j["render"].contains("kind")) {
            if (!j["render"]["kind"].is_string()) bad("render.kind must be a string");
            c.render.kind = j["render"]["kind"].get<std::string>();
        }
        if (j["render"].contains("size")) c.render.size = integer(j["render"]["size"], "render.size", 16, 4096);
    }
    if (c.render.kind != "sphere-sets" && c.render.kind != "fiber-slice" && c.render.kind != "scan-heatmap")
        bad("render.kind must be sphere-sets, fiber-slice or scan-heatmap");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.samples) {
        if (*o.samples < 1) bad("--samples must be positive");
        cfg.degree_samples = *o.samples;
        cfg.p3.samples = *o.samples;
    }
    if (o.depth) {
        if (*o.depth < 1) bad("--depth must be positive");
        cfg.slice_depth = *o.depth;
        cfg.p3.slice_depth = *o.depth;
    }
    if (o.budget) {
        if (!(*o.budget >= 1.0)) bad("--budget must be at least 1");
        cfg.budget = *o.budget;
    }
}

Outcome analyze(const RunConfig& cfg) { return pipeline(cfg, "analyze", true, true); }
Outcome certify(const RunConfig& cfg) { return pipeline(cfg, "certify", true, false); }

Outcome potential(const RunConfig& cfg) {
    Outcome out;
    json rep = header(cfg, "potential");
    Stopwatch sw;
    std::string stage = "epsilon";
    int code = kPass;
    json failures = json::array();
    try {
        const cplx eps = resolve_epsilon(cfg, rep);
        const PencilEndo f = cfg.map(eps);
        double rho = 0.0;
        if (cfg.potential_rho) {
            rho = *cfg.potential_rho;
            rep["rho"] = {{"rule", "configured"}, {"value", rho}};
        } else {
            stage = "trapping";
            const TrappingCertificate tc = certify_trapping(f, cfg.trapping_samples, cfg.seed);
            rep["trapping"] = trapping_json(tc);
            rho = tc.rho;
            rep["rho"] = {{"rule", "trapping"}, {"value", rho}};
        }
        sw.lap("setup");
        stage = "potential";
        TraceOptions o = cfg.trace;
        o.seed = cfg.seed;
        rep["potential"] = trace_json(potential_trace(f, rho, o), o);
        sw.lap("potential");
    } catch (const Error& e) {
        failures.push_back(failure(stage, e));
        code = exit_code_for(e.kind());
    }
    rep["failures"] = failures;
    finish(rep, code, sw);
    out.report = std::move(rep);
    out.exit_code = code;
    return out;
}

Outcome slice(const RunConfig& cfg) {
    Outcome out;
    json rep = header(cfg, "slice");
    Stopwatch sw;
    std::string stage = "epsilon";
    int code = kPass;
    json failures = json::array();
    try {
        const PencilEndo f = cfg.map(resolve_epsilon(cfg, rep));
        stage = "slice";
        const SliceMeasure mu = slice_measure(f, cfg.slice_base, cfg.slice_depth, cfg.budget);
        out.artifacts.push_back({"clouds/slice_measure.csv", slice_csv(mu)});
        out.artifacts.push_back({"clouds/solenoid.csv", cloud_csv(solenoid_points(f, cfg.slice_base, cfg.slice_depth, cfg.budget))});
        json refine = json::array();
        for (int n = 1; n < cfg.slice_depth; ++n) refine.push_back({n, slice_refinement(f, cfg.slice_base, n, cfg.budget)});
        rep["slice"] = {{"base", point_json(cfg.slice_base)},
                        {"depth", cfg.slice_depth},
                        {"atoms", mu.atoms.size()},
                        {"totalWeight", mu.total_weight()},
                        {"refinement", refine},
                        {"tolerance", {{"totalWeight", "1 +- 1e-10"}}}};
        sw.lap("slice");
    } catch (const Error& e) {
        failures.push_back(failure(stage, e));
        code = exit_code_for(e.kind());
    }
    rep["failures"] = failures;
    finish(rep, code, sw);
    out.report = std::move(rep);
    out.exit_code = code;
    return out;
}

Outcome scan(const RunConfig& cfg) {
    Outcome out;
    json rep = header(cfg, "scan");
    Stopwatch sw;
    int code = kPass;
    json failures = json::array();
    try {
        const auto cells = run_scan(cfg.scan);
        std::string csv = "a_re,a_im,b_re,b_im,status,cond1,cond2,cond2simplified,cond1_margin,cond2_margin,cond2simplified_margin\n";
        std::map<std::string, int> tally;
        for (const auto& c : cells) {
            csv += format_double(c.a.real()) + "," + format_double(c.a.imag()) + "," + format_double(c.b.real()) + "," +
                   format_double(c.b.imag()) + "," + c.status + "," + (c.cond1 ? "1" : "0") + "," + (c.cond2 ? "1" : "0") +
                   "," + (c.cond2s ? "1" : "0") + "," + format_double(c.m1) + "," + format_double(c.m2) + "," +
                   format_double(c.m2s) + "\n";
            ++tally[c.status];
        }
        out.artifacts.push_back({"scan.csv", csv});
        json t = json::object();
        for (const auto& [k, v] : tally) t[k] = v;
        rep["scan"] = {{"family", cfg.scan.family},
                       {"degree", cfg.scan.family == "swap" ? 2 : cfg.scan.degree},
                       {"cells", cells.size()},
                       {"tally", t},
                       {"passFraction", cells.empty() ? 0.0 : static_cast<double>(tally["pass"]) / cells.size()}};
        sw.lap("scan");
    } catch (const Error& e) {
        failures.push_back(failure("scan", e));
        code = exit_code_for(e.kind());
    }
    rep["failures"] = failures;
    finish(rep, code, sw);
    out.report = std::move(rep);
    out.exit_code = code;
    return out;
}

Outcome p3(const RunConfig& cfg) {
    Outcome out;
    json rep = header(cfg, "p3");
    Stopwatch sw;
    std::string stage = "build";
    int code = kPass;
    json failures = json::array();
    const P3Options& o = cfg.p3;
    try {
        if (o.variant == "hyperplane") {
            if (cfg.degree < 1 || cfg.P.empty()) bad("hyperplane needs degree, P, Q and R");
            const P3Endo f = build_invariant_hyperplane(BinaryForm(cfg.P), BinaryForm(cfg.Q), BinaryForm(cfg.R), o.eps1, o.eps2);
            rep["prerequisites"] = {{"specialSets", true}, {"fixedPoint", true}};
            const P3Region r = p3_region(f, o.c);
            stage = "trapping";
            const P3Trapping t = certify_p3_trapping(f, r, o.trapping_samples, cfg.seed);
            rep["region"] = {{"rho1", r.rho1}, {"rho2", r.rho2}, {"c", o.c}};
            rep["trapping"] = {{"slack1", t.slack1}, {"slack2", t.slack2}, {"sampledDelta1", t.sampled_delta1},
                               {"sampledDelta2", t.sampled_delta2}, {"samples", t.samples}, {"ok", t.ok()},
                               {"tolerance", {{"slack", "> 0"}, {"sampledDelta", "> 0"}}}};
            stage = "hyperplane";
            const double res = hyperplane_residual(f, o.residual_samples, cfg.seed);
            rep["hyperplane"] = {{"residual", res}, {"samples", o.residual_samples}, {"tolerance", 1e-12}, {"ok", res < 1e-12}};
            sw.lap("setup");
            stage = "certificate";
            const DegreeCertificate dc = certify_p3_degree(f, r, o.m, o.samples, cfg.seed);
            rep["certificate"] = degree_json(dc);
            rep["certificate"]["expectedBound"] = static_cast<int>(std::lround(std::pow(f.degree(), o.m - 1)));
            sw.lap("certificate");
            std::vector<P3> cloud;
            for (int i = 0; i < cfg.attractor_points; ++i) {
                Rng rng = Rng::derived(cfg.seed, static_cast<std::uint64_t>(i));
                P3 x = sample_U3(f, r, rng);
                for (int k = 0; k < 50; ++k) x = apply3(f, x);
                cloud.push_back(x);
            }
            out.artifacts.push_back({"clouds/p3_attractor.csv", cloud_csv(cloud)});
            const bool ok = t.ok() && res < 1e-12 && dc.verdict;
            code = ok ? kPass : kCertificationFail;
        } else {
            const P3Endo f = build_product_type(o.eps1, o.eps2);
            stage = "equivariance";
            Rng rng(cfg.seed);
            double worst = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const P3 x({rng.complex_normal(), rng.complex_normal(), 0.1 * rng.complex_normal(), 0.1 * rng.complex_normal()});
                const P3 y = apply3(f, x);
                worst = std::max(worst, chordal(project_first(y), apply(f.first, project_first(x))));
                worst = std::max(worst, chordal(project_second(y), apply(f.second, project_second(x))));
            }
            rep["equivariance"] = {{"maxChordal", worst}, {"samples", 1000}, {"tolerance", 1e-12}, {"ok", worst < 1e-12}};
            sw.lap("equivariance");
            bool henon = true;
            json factors = json::array();
            std::vector<double> slopes;
            for (const PencilEndo* g : {&f.first, &f.second}) {
                stage = "horizontal-like";
                const double rho = trapping_constants(*g, sphere_extrema(g->P(), g->Q(), g->R())).rho;
                const Box box{o.box.inner, o.box.outer, rho};
                const HorizontalLikeReport h = horizontal_like_check(*g, box, o.boundary_samples, o.injectivity_samples, cfg.seed);
                henon = henon && h.henon_like();
                stage = "box-counting";
                const auto cloud = fiber_chart_cloud(o.slice_base, solenoid_points(*g, o.slice_base, o.slice_depth, cfg.budget));
                double diam = 0.0;
                for (const auto& c : cloud) diam = std::max(diam, std::hypot(c[0], c[1]));
                const BoxCounting bc = box_counting_dim(cloud, scale_ladder(diam, diam * std::pow(10.0, -o.decades), o.scales));
                slopes.push_back(bc.slope);
                factors.push_back({{"epsilon", cplx_json(g->epsilon())}, {"horizontalLike", horizontal_json(h, box)},
                                   {"boxCounting", boxcount_json(bc)}, {"slicePoints", cloud.size()}});
            }
            sw.lap("factors");
            rep["factors"] = factors;
            rep["slopeGap"] = {{"value", slopes[0] - slopes[1]}, {"tolerance", "> 0 (empirical diagnostic)"}};
            code = (worst < 1e-12 && henon && slopes[0] > slopes[1]) ? kPass : kCertificationFail;
        }
    } catch (const Error& e) {
        failures.push_back(failure(stage, e));
        code = exit_code_for(e.kind());
    }
    rep["failures"] = failures;
    finish(rep, code, sw);
    out.report = std::move(rep);
    out.exit_code = code;
    return out;
}

Outcome render(const RunConfig& cfg) {
    json rep = header(cfg, "render");
    Stopwatch sw;
    Outcome out;
    int code = kPass;
    json failures = json::array();
    try {
        if (cfg.render.kind == "sphere-sets") out = render_sphere_sets(cfg, rep);
        else if (cfg.render.kind == "fiber-slice") out = render_fiber_slice(cfg, rep);
        else out = render_scan_heatmap(cfg, rep);
        sw.lap("render");
    } catch (const Error& e) {
        failures.push_back(failure("render", e));
        code = exit_code_for(e.kind());
    }
    rep["failures"] = failures;
    finish(rep, code, sw);
    out.report = std::move(rep);
    out.exit_code = code;
    return out;
}

Outcome run_subcommand(const std::string& name, const RunConfig& cfg) {
    static const std::map<std::string, std::function<Outcome(const RunConfig&)>> table{
        {"analyze", analyze}, {"certify", certify}, {"potential", potential}, {"slice", slice},
        {"scan", scan},       {"p3", p3},           {"render", render}};
    const auto it = table.find(name);
    if (it == table.end()) bad("unknown subcommand " + name);
    return it->second(cfg);
}

json cplx_json(cplx c) { return json::array({c.real(), c.imag()}); }

json point_json(const P1& p) { return json::array({cplx_json(p[0]), cplx_json(p[1])}); }

json points_json(const std::vector<P1>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(point_json(p));
    return a;
}

json point_json(const P2& p) { return json::array({cplx_json(p[0]), cplx_json(p[1]), cplx_json(p[2])}); }

std::string cloud_csv(const std::vector<P2>& pts) {
    std::string s = "# chart: canonical unit lift [z:w:t]\nz_re,z_im,w_re,w_im,t_re,t_im\n";
    for (const auto& p : pts) {
        for (std::size_t i = 0; i < 3; ++i) s += format_double(p[i].real()) + "," + format_double(p[i].imag()) + (i < 2 ? "," : "\n");
    }
    return s;
}

std::string cloud_csv(const std::vector<P3>& pts) {
    std::string s = "# chart: canonical unit lift [z:w:t:u]\nz_re,z_im,w_re,w_im,t_re,t_im,u_re,u_im\n";
    for (const auto& p : pts) {
        for (std::size_t i = 0; i < 4; ++i) s += format_double(p[i].real()) + "," + format_double(p[i].imag()) + (i < 3 ? "," : "\n");
    }
    return s;
}

std::string slice_csv(const SliceMeasure& mu) {
    std::string s = "re,im,weight\n";
    for (const auto& a : mu.atoms) s += format_double(a.s.real()) + "," + format_double(a.s.imag()) + "," + format_double(a.weight) + "\n";
    return s;
}

std::string stable_dump(const json& report) {
    json r = report;
    r.erase("timing");
    return r.dump(2);
}

std::string Image::ppm() const {
    std::string s = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    s.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    return s;
}

}  // namespace attract::kit
