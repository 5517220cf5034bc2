// attracting-kit: command-line front end over attract::kit.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "attract/kit.hpp"

namespace fs = std::filesystem;
using namespace attract;

namespace {

void write_file(const fs::path& p, const std::string& bytes) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << bytes;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify and explore attracting sets of pencil maps on P^2 and P^3."};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    kit::Overrides ov;
    std::optional<std::string> kind;

    for (const char* name : {"analyze", "certify", "potential", "slice", "scan", "p3", "render"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", ov.seed, "override the config seed");
        sub->add_option("--samples", ov.samples, "override certificate sample counts");
        sub->add_option("--depth", ov.depth, "override slice depths");
        sub->add_option("--budget", ov.budget, "override the preimage-tree budget");
        if (std::string(name) == "render") sub->add_option("--kind", kind, "sphere-sets | fiber-slice | scan-heatmap");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kit::kConfigError;
    }
    const std::string subname = app.get_subcommands().front()->get_name();

    kit::Outcome outcome;
    try {
        kit::RunConfig cfg = kit::load_config(config_path);
        kit::apply_overrides(cfg, ov);
        if (kind) {
            if (*kind != "sphere-sets" && *kind != "fiber-slice" && *kind != "scan-heatmap")
                throw Error(ErrorKind::ConfigInvalid, "unknown render kind " + *kind);
            cfg.render.kind = *kind;
        }
        outcome = kit::run_subcommand(subname, cfg);
    } catch (const Error& e) {
        std::cerr << "attracting-kit: " << e.what() << "\n";
        outcome.exit_code = kit::exit_code_for(e.kind());
        outcome.report = {{"schema", kit::kReportSchema},
                          {"subcommand", subname},
                          {"status", "config-invalid"},
                          {"exitCode", outcome.exit_code},
                          {"failures", kit::json::array({{{"stage", "config"}, {"kind", to_string(e.kind())}, {"message", e.what()}}})}};
    }

    try {
        const fs::path root(out_dir);
        write_file(root / "report.json", outcome.report.dump(2) + "\n");
        for (const auto& a : outcome.artifacts) write_file(root / a.path, a.bytes);
    } catch (const std::exception& e) {
        std::cerr << "attracting-kit: " << e.what() << "\n";
        return kit::kConfigError;
    }
    std::cout << subname << ": " << outcome.report.value("status", std::string("?")) << " (exit " << outcome.exit_code
              << ")\n";
    return outcome.exit_code;
}
