#pragma once

// Orchestration behind the attracting-kit command line: config parsing,
// pipelines, and JSON/CSV/PPM serialization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "attract/degree_cert.hpp"
#include "attract/p3ext.hpp"
#include "attract/potential.hpp"
#include "attract/special_sets.hpp"

namespace attract::kit {

using json = nlohmann::ordered_json;

inline constexpr const char* kConfigSchema = "attracting-kit/config/1";
inline constexpr const char* kReportSchema = "attracting-kit/report/1";

enum ExitCode : int { kPass = 0, kCertificationFail = 2, kDegenerateInput = 3, kBudget = 4, kConfigError = 5 };

int exit_code_for(ErrorKind kind);

struct GridAxis {
    cplx from = 0.01, to = 0.1;
    int count = 10;
    cplx at(int i) const { return count == 1 ? from : from + (to - from) * (static_cast<double>(i) / (count - 1)); }
};

struct ScanOptions {
    std::string family = "powers";  // powers | swap
    int degree = 2;
    GridAxis a, b;
    bool diagonal = false;  // only the cells a = b
    int max_cells = 10000;
};

struct P3Options {
    std::string variant = "hyperplane";  // hyperplane | product
    cplx eps1 = 1e-4, eps2 = 0.01;
    double c = 0.1;
    int m = 6;
    int samples = 200;
    int trapping_samples = 10000;
    int residual_samples = 10000;
    Box box;
    int boundary_samples = 10000;
    int injectivity_samples = 1000;
    int slice_depth = 14;
    double decades = 6.0;
    int scales = 25;
    P1 slice_base = make_p1(1.0, 1.0);
};

struct RenderOptions {
    std::string kind = "sphere-sets";  // sphere-sets | fiber-slice | scan-heatmap
    int size = 256;
};

struct RunConfig {
    std::string name;
    int degree = 0;
    std::vector<cplx> P, Q, R;
    bool epsilon_auto = true;
    cplx epsilon = 0.0;
    double epsilon_cap = 1e-3;
    std::uint64_t seed = 0;
    int escalate = 0;
    double budget = 1e7;
    int trapping_samples = 10000;
    int degree_m = 3;
    int degree_samples = 1000;
    bool run_potential = true;
    TraceOptions trace;
    std::optional<double> potential_rho;
    P1 slice_base = make_p1(1.0, 1.0);
    int slice_depth = 10;
    int attractor_points = 1000;
    ScanOptions scan;
    P3Options p3;
    RenderOptions render;
    json raw;

    PrecisionProfile precision() const;
    PencilEndo map(cplx eps) const;
};

/// Throws Error(ConfigInvalid) on any schema violation.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> samples, depth;
    std::optional<double> budget;
};
void apply_overrides(RunConfig& cfg, const Overrides& o);

struct Artifact {
    std::string path;  // relative to the output directory
    std::string bytes;
};

struct Outcome {
    json report;
    int exit_code = kPass;
    std::vector<Artifact> artifacts;
};

Outcome analyze(const RunConfig& cfg);
Outcome certify(const RunConfig& cfg);
Outcome potential(const RunConfig& cfg);
Outcome slice(const RunConfig& cfg);
Outcome scan(const RunConfig& cfg);
Outcome p3(const RunConfig& cfg);
Outcome render(const RunConfig& cfg);

Outcome run_subcommand(const std::string& name, const RunConfig& cfg);

// Serialization shared with tests.
json cplx_json(cplx c);
json point_json(const P1& p);
json points_json(const std::vector<P1>& pts);
json point_json(const P2& p);
std::string cloud_csv(const std::vector<P2>& pts);
std::string cloud_csv(const std::vector<P3>& pts);
std::string slice_csv(const SliceMeasure& mu);

/// Report without its timing block, as the string compared across runs.
std::string stable_dump(const json& report);

struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;
    std::string ppm() const;
};

}  // namespace attract::kit
