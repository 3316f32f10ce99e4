#include "fracthj/errors.hpp"
#include "fracthj/experiment.hpp"
#include "fracthj/hj_solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitStability = 4;

void write_error_record(const std::string& out_dir, const std::string& type,
                        const std::string& message, int code) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) return;
    nlohmann::json j;
    j["error"] = type;
    j["message"] = message;
    j["exit_code"] = code;
    std::ofstream out(std::filesystem::path(out_dir) / "error.json",
                      std::ios::binary);
    out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracthj: fractional-time PDE experiment runner"};
    std::string kind;
    std::string config_path;
    std::string out_dir;
    int levels = 3;
    long long seed = -1;
    bool quiet = false;

    app.add_option("kind", kind,
                   "experiment kind: heat|hj|fp|duality|ml-table|convergence")
        ->required();
    app.add_option("--config", config_path, "path to the JSON config file")
        ->required();
    app.add_option("--out", out_dir, "output directory (default: from config, else .)");
    app.add_option("--levels", levels, "refinement levels for convergence runs");
    app.add_option("--seed", seed, "override the config seed");
    app.add_flag("--quiet", quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    fracthj::ExperimentConfig cfg;
    try {
        cfg = fracthj::load_config(config_path);
        if (cfg.kind != kind)
            throw fracthj::config_error("config kind '" + cfg.kind +
                                        "' does not match CLI kind '" + kind + "'");
        if (seed >= 0) cfg.seed = static_cast<unsigned long>(seed);
        if (out_dir.empty()) out_dir = cfg.output.empty() ? "." : cfg.output;
    } catch (const fracthj::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        fracthj::run_experiment(cfg, out_dir, levels, quiet);
    } catch (const fracthj::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fracthj::picard_divergence& e) {
        std::cerr << "solver non-convergence: " << e.what() << "\n";
        write_error_record(out_dir, "picard_divergence", e.what(),
                           kExitNoConvergence);
        return kExitNoConvergence;
    } catch (const fracthj::step_restriction_error& e) {
        std::cerr << "stability abort: " << e.what() << "\n";
        write_error_record(out_dir, "step_restriction", e.what(), kExitStability);
        return kExitStability;
    } catch (const fracthj::stability_error& e) {
        std::cerr << "stability abort: " << e.what() << "\n";
        write_error_record(out_dir, "stability", e.what(), kExitStability);
        return kExitStability;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_record(out_dir, "internal", e.what(), 1);
        return 1;
    }
    return kExitOk;
}
