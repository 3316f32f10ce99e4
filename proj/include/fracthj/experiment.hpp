#pragma once

#include "fracthj/adjoint_fp.hpp"
#include "fracthj/expressions.hpp"
#include "fracthj/hj_solver.hpp"
#include "fracthj/linear_solver.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fracthj {

/// One experiment, parsed and validated from a JSON config file.
/// Unknown keys are rejected at every nesting level.
struct ExperimentConfig {
    std::string kind;  // heat | hj | fp | duality | ml-table | convergence

    double beta = 0.5;
    double sigma = 1.0;
    int dim = 1;
    int n = 64;
    double t_final = 1.0;
    int steps = 64;
    double grading_exponent = 1.0;

    // hamiltonian block (hj / duality / convergence-over-hj)
    std::string h_kind = "quadratic";
    double h_gamma = 2.0;
    std::optional<Expression> h_coefficient;  // default: constant 1

    std::optional<Expression> u0;
    std::optional<Expression> V;
    std::optional<Expression> rho_tau;
    std::vector<Expression> drift;  // one expression per dimension

    // solver block
    double tol = 1e-8;
    int max_picard = 120;
    std::string scheme;  // heat: l1|mild|classical; fp: spectral|upwind
    double window = 0.0;  // hj continuation window; 0 = single Picard solve

    // ml block (kind = ml-table)
    double ml_alpha = 0.5;
    double ml_b = 1.0;
    std::vector<double> ml_z;

    // convergence block
    std::string target;  // caputo | heat | hj | duality
    int levels = 3;

    std::string output;  // default output directory (CLI --out overrides)
    unsigned long seed = 0;

    nlohmann::json raw;  // config as read, echoed into the manifest

    void validate() const;

    TorusGrid make_grid() const;
    TimeGrid make_time_grid() const;
    Hamiltonian make_h(const TorusGrid& g) const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Runs the experiment and writes solution.csv, diagnostics.csv and
/// manifest.json into out_dir (created if missing). Deterministic for a
/// fixed config + seed. levels applies to kind = convergence only.
void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                    int levels, bool quiet);

/// One row of a refinement study.
struct ConvergenceRow {
    int level;
    int steps;
    double error;
    double order;  // NaN on the first row
};

/// Halves the time step per level and measures the error of each level
/// against a closed-form reference (target caputo) or the finest level
/// (targets heat, hj, duality uses its own residual). A level that throws
/// aborts the study; rows completed so far are returned via the partial
/// output parameter before the exception propagates.
std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& cfg,
                                              int levels,
                                              std::vector<ConvergenceRow>* partial);

/// Formats a double with 17 significant digits (CSV cell convention).
std::string csv_double(double v);

}  // namespace fracthj
