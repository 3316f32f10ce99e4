#include "fracthj/experiment.hpp"

#include "fracthj/errors.hpp"
#include "fracthj/frac_calc.hpp"
#include "fracthj/special.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>

namespace fracthj {

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw config_error(where + ": unknown key '" + key + "'");
}

Expression parse_expr_or_number(const nlohmann::json& j, const std::string& where) {
    if (j.is_number()) {
        Expression e;
        ExprTerm t;
        t.kind = ExprTerm::Kind::constant;
        t.coef = j.get<double>();
        e.terms.push_back(t);
        return e;
    }
    if (!j.is_array()) throw config_error(where + ": expected number or term array");
    return parse_expression(j);
}

}  // namespace

void ExperimentConfig::validate() const {
    static const std::set<std::string> kinds = {"heat",    "hj",       "fp",
                                               "duality", "ml-table", "convergence"};
    if (!kinds.count(kind)) throw config_error("config: unknown kind '" + kind + "'");
    if (!(beta > 0.0 && beta < 1.0)) throw config_error("config: beta in (0,1)");
    if (!(sigma > 0.0)) throw config_error("config: sigma must be positive");
    if (dim != 1 && dim != 2) throw config_error("config: dim must be 1 or 2");
    if (n < 8 || n % 2 != 0) throw config_error("config: n must be even and >= 8");
    if (!(t_final > 0.0)) throw config_error("config: t_final must be positive");
    if (steps < 1) throw config_error("config: steps >= 1");
    if (!(grading_exponent >= 1.0)) throw config_error("config: grading_exponent >= 1");
    if (!(tol > 0.0)) throw config_error("config: tol must be positive");
    if (max_picard < 1) throw config_error("config: max_picard >= 1");
    if (window < 0.0 || window > t_final)
        throw config_error("config: window in [0, t_final]");
    if (!(h_gamma > 1.0)) throw config_error("config: hamiltonian gamma > 1");
    if (h_kind != "quadratic" && h_kind != "power")
        throw config_error("config: hamiltonian kind must be quadratic or power");
    if (!drift.empty() && static_cast<int>(drift.size()) != dim)
        throw config_error("config: drift needs one expression per dimension");

    if (kind == "heat" || (kind == "convergence" && target == "heat")) {
        if (!scheme.empty() && scheme != "l1" && scheme != "mild" &&
            scheme != "classical")
            throw config_error("config: heat scheme must be l1, mild or classical");
    }
    if (kind == "fp" || kind == "duality") {
        if (!scheme.empty() && scheme != "spectral" && scheme != "upwind")
            throw config_error("config: fp scheme must be spectral or upwind");
        if (!rho_tau) throw config_error("config: kind '" + kind + "' needs rho_tau");
    }
    if (kind == "ml-table") {
        if (ml_z.empty()) throw config_error("config: ml-table needs ml.z_values");
        if (!(ml_alpha > 0.0 && ml_alpha <= 1.0))
            throw config_error("config: ml.alpha in (0,1]");
        if (!(ml_b > 0.0)) throw config_error("config: ml.b must be positive");
        for (double z : ml_z)
            if (z > 0.0) throw config_error("config: ml.z_values must be <= 0");
    }
    if (kind == "convergence") {
        static const std::set<std::string> targets = {"caputo", "heat", "hj",
                                                      "duality"};
        if (!targets.count(target))
            throw config_error(
                "config: convergence target must be caputo, heat, hj or duality");
        if (target == "duality" && !rho_tau)
            throw config_error("config: duality target needs rho_tau");
        if (levels < 3) throw config_error("config: levels >= 3");
    }
}

TorusGrid ExperimentConfig::make_grid() const { return TorusGrid{dim, n}; }

TimeGrid ExperimentConfig::make_time_grid() const {
    return grading_exponent > 1.0
               ? TimeGrid::graded(t_final, steps, beta, grading_exponent)
               : TimeGrid::uniform(t_final, steps, beta);
}

Hamiltonian ExperimentConfig::make_h(const TorusGrid& g) const {
    Field coeff = h_coefficient ? evaluate_field(*h_coefficient, g, 0.0)
                                : Field::constant(g, 1.0);
    const auto kind_enum = h_kind == "power" ? Hamiltonian::Kind::power
                                             : Hamiltonian::Kind::quadratic;
    return make_hamiltonian(kind_enum, h_gamma, coeff);
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("config: expected a JSON object");
    static const std::set<std::string> top = {
        "kind",   "beta",  "sigma",  "dim",     "n",      "t_final",
        "steps",  "grading_exponent", "hamiltonian", "u0", "V",
        "rho_tau", "drift", "solver", "ml",     "output", "seed",
        "target", "levels"};
    check_keys(j, top, "config");

    ExperimentConfig c;
    c.raw = j;
    if (!j.contains("kind")) throw config_error("config: missing 'kind'");
    c.kind = j["kind"].get<std::string>();
    c.beta = j.value("beta", c.beta);
    c.sigma = j.value("sigma", c.sigma);
    c.dim = j.value("dim", c.dim);
    c.n = j.value("n", c.n);
    c.t_final = j.value("t_final", c.t_final);
    c.steps = j.value("steps", c.steps);
    c.grading_exponent = j.value("grading_exponent", c.grading_exponent);
    c.output = j.value("output", c.output);
    c.seed = j.value("seed", c.seed);
    c.target = j.value("target", c.target);
    c.levels = j.value("levels", c.levels);

    if (j.contains("hamiltonian")) {
        const auto& h = j["hamiltonian"];
        check_keys(h, {"kind", "gamma", "coefficient"}, "config.hamiltonian");
        c.h_kind = h.value("kind", c.h_kind);
        c.h_gamma = h.value("gamma", c.h_gamma);
        if (h.contains("coefficient"))
            c.h_coefficient =
                parse_expr_or_number(h["coefficient"], "config.hamiltonian.coefficient");
    }
    if (j.contains("u0")) c.u0 = parse_expr_or_number(j["u0"], "config.u0");
    if (j.contains("V")) c.V = parse_expr_or_number(j["V"], "config.V");
    if (j.contains("rho_tau"))
        c.rho_tau = parse_expr_or_number(j["rho_tau"], "config.rho_tau");
    if (j.contains("drift")) {
        if (!j["drift"].is_array())
            throw config_error("config.drift: expected an array (one per dimension)");
        for (const auto& comp : j["drift"])
            c.drift.push_back(parse_expr_or_number(comp, "config.drift"));
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        check_keys(s, {"tol", "max_picard", "scheme", "window"}, "config.solver");
        c.tol = s.value("tol", c.tol);
        c.max_picard = s.value("max_picard", c.max_picard);
        c.scheme = s.value("scheme", c.scheme);
        c.window = s.value("window", c.window);
    }
    if (j.contains("ml")) {
        const auto& m = j["ml"];
        check_keys(m, {"alpha", "b", "z_values"}, "config.ml");
        c.ml_alpha = m.value("alpha", c.ml_alpha);
        c.ml_b = m.value("b", c.ml_b);
        if (m.contains("z_values"))
            c.ml_z = m["z_values"].get<std::vector<double>>();
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: parse failure: ") + e.what());
    }
    return parse_config(j);
}

namespace {

struct CsvFile {
    std::ofstream out;

    CsvFile(const std::filesystem::path& p, const std::string& header) {
        out.open(p, std::ios::binary);  // byte-stable line endings
        if (!out) throw std::runtime_error("cannot open " + p.string());
        out << "# manifest: manifest.json\n" << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << "\n";
    }
    void metric(const std::string& name, double v) { row({name, csv_double(v)}); }
};

void write_solution_csv(const std::filesystem::path& p, const SpaceTimeField& u) {
    const TorusGrid& g = u.snapshots.front().grid;
    CsvFile f(p, g.dim == 1 ? "t,x,u" : "t,x,y,u");
    for (size_t m = 0; m < u.snapshots.size(); ++m) {
        const double t = u.tgrid.nodes[m];
        for (int i = 0; i < g.size(); ++i) {
            double x[2];
            g.coords(i, x);
            if (g.dim == 1)
                f.row({csv_double(t), csv_double(x[0]),
                       csv_double(u.snapshots[m].values[i])});
            else
                f.row({csv_double(t), csv_double(x[0]), csv_double(x[1]),
                       csv_double(u.snapshots[m].values[i])});
        }
    }
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                    const std::vector<std::string>& files) {
    nlohmann::json m;
    m["version"] = "fracthj 0.1.0";
    m["kind"] = cfg.kind;
    m["seed"] = cfg.seed;
    m["files"] = files;
    m["config"] = cfg.raw;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
}

SpaceTimeField spacetime_or_zero(const std::optional<Expression>& e,
                                 const TorusGrid& g, const TimeGrid& tg) {
    if (e) return evaluate_spacetime(*e, g, tg);
    SpaceTimeField f;
    f.tgrid = tg;
    f.snapshots.assign(tg.nodes.size(), Field::zeros(g));
    return f;
}

Field field_or_zero(const std::optional<Expression>& e, const TorusGrid& g,
                    double t) {
    return e ? evaluate_field(*e, g, t) : Field::zeros(g);
}

LinearProblem build_linear(const ExperimentConfig& cfg) {
    LinearProblem p;
    p.grid = cfg.make_grid();
    p.tgrid = cfg.make_time_grid();
    p.sigma = cfg.sigma;
    p.u0 = field_or_zero(cfg.u0, p.grid, 0.0);
    if (cfg.V) p.source = evaluate_spacetime(*cfg.V, p.grid, p.tgrid);
    if (!cfg.drift.empty()) {
        std::vector<SpaceTimeField> b;
        for (const auto& e : cfg.drift)
            b.push_back(evaluate_spacetime(e, p.grid, p.tgrid));
        p.drift = std::move(b);
    }
    return p;
}

SpaceTimeField run_heat(const ExperimentConfig& cfg) {
    const LinearProblem p = build_linear(cfg);
    if (cfg.scheme == "mild") return solve_heat_mild(p);
    if (cfg.scheme == "classical") return solve_heat_classical(p);
    return solve_heat_l1(p);
}

HjProblem build_hj(const ExperimentConfig& cfg) {
    HjProblem p;
    p.grid = cfg.make_grid();
    p.tgrid = cfg.make_time_grid();
    p.sigma = cfg.sigma;
    p.H = cfg.make_h(p.grid);
    p.V = spacetime_or_zero(cfg.V, p.grid, p.tgrid);
    p.u0 = field_or_zero(cfg.u0, p.grid, 0.0);
    p.tol = cfg.tol;
    p.max_picard = cfg.max_picard;
    return p;
}

struct HjRun {
    SpaceTimeField u;
    PicardTrace trace;  // empty when continuation was used
    bool continued = false;
};

HjRun run_hj(const ExperimentConfig& cfg, const HjProblem& p) {
    if (cfg.window > 0.0)
        return {solve_hj_continued(p, cfg.window), {}, true};
    HjSolution s = solve_hj_picard(p);
    if (!s.trace.converged)
        throw picard_divergence("hj: Picard hit max_picard without converging",
                                s.trace, p.tgrid.t_final);
    return {std::move(s.u), std::move(s.trace), false};
}

FpProblem build_fp(const ExperimentConfig& cfg,
                   const std::vector<SpaceTimeField>* drift_fields) {
    FpProblem p;
    p.grid = cfg.make_grid();
    p.tgrid = cfg.make_time_grid();
    p.sigma = cfg.sigma;
    p.terminal = field_or_zero(cfg.rho_tau, p.grid, cfg.t_final);
    if (drift_fields) {
        p.drift = *drift_fields;
    } else if (!cfg.drift.empty()) {
        std::vector<SpaceTimeField> b;
        for (const auto& e : cfg.drift)
            b.push_back(evaluate_spacetime(e, p.grid, p.tgrid));
        p.drift = std::move(b);
    }
    return p;
}

void picard_diagnostics(CsvFile& d, const PicardTrace& tr) {
    d.metric("picard_iterations", tr.iterations);
    d.metric("picard_converged", tr.converged ? 1.0 : 0.0);
    for (size_t i = 0; i < tr.delta_sup.size(); ++i)
        d.metric("picard_delta_sup_" + std::to_string(i), tr.delta_sup[i]);
    for (size_t i = 0; i < tr.ratios.size(); ++i)
        d.metric("picard_ratio_" + std::to_string(i), tr.ratios[i]);
}

double restrict_error(const SpaceTimeField& coarse, const SpaceTimeField& fine) {
    const int stride = fine.tgrid.steps / coarse.tgrid.steps;
    double e = 0.0;
    for (size_t m = 0; m < coarse.snapshots.size(); ++m)
        for (size_t j = 0; j < coarse.snapshots[m].values.size(); ++j)
            e = std::max(e, std::abs(coarse.snapshots[m].values[j] -
                                     fine.snapshots[m * stride].values[j]));
    return e;
}

double caputo_power_error(const ExperimentConfig& cfg, int steps) {
    ExperimentConfig c = cfg;
    c.steps = steps;
    const TimeGrid tg = c.make_time_grid();
    TimeSeries u{tg, {}};
    u.values.reserve(tg.nodes.size());
    for (double t : tg.nodes) u.values.push_back(t * t);
    const TimeSeries d = caputo_forward(u, cfg.beta, cfg.grading_exponent > 1.0);
    const double c0 = gamma_fn(3.0) / gamma_fn(3.0 - cfg.beta);
    double e = 0.0;
    for (size_t m = 1; m < d.values.size(); ++m)
        e = std::max(e, std::abs(d.values[m] -
                                 c0 * std::pow(tg.nodes[m], 2.0 - cfg.beta)));
    return e;
}

double duality_run_residual(const ExperimentConfig& cfg, int steps) {
    ExperimentConfig c = cfg;
    c.steps = steps;
    const HjProblem hp = build_hj(c);
    const HjRun hr = run_hj(c, hp);
    std::vector<SpaceTimeField> b(hp.grid.dim);
    for (int d = 0; d < hp.grid.dim; ++d) {
        b[d].tgrid = hp.tgrid;
        b[d].snapshots.reserve(hr.u.snapshots.size());
    }
    for (const auto& snap : hr.u.snapshots) {
        const auto drift = hamiltonian_drift(hp.H, snap);
        for (int d = 0; d < hp.grid.dim; ++d)
            b[d].snapshots.push_back(drift[d]);
    }
    const FpProblem fp = build_fp(c, &b);
    const FpScheme scheme =
        c.scheme == "upwind" ? FpScheme::upwind : FpScheme::spectral;
    const SpaceTimeField rho = solve_fp_backward(fp, scheme);
    return duality_residual(hr.u, rho, hp);
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& cfg,
                                              int levels,
                                              std::vector<ConvergenceRow>* partial) {
    if (levels < 3) throw config_error("convergence: levels >= 3");
    std::vector<ConvergenceRow> rows;
    auto record = [&](int level, int steps, double error) {
        ConvergenceRow r{level, steps, error,
                         std::numeric_limits<double>::quiet_NaN()};
        if (!rows.empty() && rows.back().error > 0.0 && error > 0.0)
            r.order = std::log2(rows.back().error / error);
        rows.push_back(r);
        if (partial) *partial = rows;
    };

    if (cfg.target == "caputo") {
        for (int l = 0; l < levels; ++l) {
            const int steps = cfg.steps << l;
            record(l, steps, caputo_power_error(cfg, steps));
        }
        return rows;
    }
    if (cfg.target == "duality") {
        for (int l = 0; l < levels; ++l) {
            const int steps = cfg.steps << l;
            record(l, steps, duality_run_residual(cfg, steps));
        }
        return rows;
    }

    // heat / hj: error against the finest level at shared time nodes.
    std::vector<SpaceTimeField> sols;
    for (int l = 0; l <= levels; ++l) {
        ExperimentConfig c = cfg;
        c.steps = cfg.steps << l;
        if (cfg.target == "heat") {
            sols.push_back(run_heat(c));
        } else {
            const HjProblem p = build_hj(c);
            sols.push_back(run_hj(c, p).u);
        }
        if (l > 0) {
            // refresh errors of all coarser levels against the current finest
            std::vector<ConvergenceRow> fresh;
            std::swap(rows, fresh);
            for (int k = 0; k < l; ++k)
                record(k, cfg.steps << k, restrict_error(sols[k], sols[l]));
        }
    }
    return rows;
}

namespace {

double fitted_order(const std::vector<ConvergenceRow>& rows) {
    // least-squares slope of log2(error) against level, sign-flipped
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& r : rows) {
        if (!(r.error > 0.0)) continue;
        const double x = r.level, y = std::log2(r.error);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
    return -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

void write_convergence_csv(const std::filesystem::path& p,
                           const std::vector<ConvergenceRow>& rows) {
    CsvFile f(p, "level,steps,error,order");
    for (const auto& r : rows)
        f.row({std::to_string(r.level), std::to_string(r.steps),
               csv_double(r.error), csv_double(r.order)});
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                    int levels, bool quiet) {
    cfg.validate();
    namespace fs = std::filesystem;
    const fs::path dir = out_dir;
    fs::create_directories(dir);

    auto note = [&](const std::string& s) {
        if (!quiet) std::cout << s << "\n";
    };

    if (cfg.kind == "ml-table") {
        MlFamily fam(cfg.ml_alpha, cfg.ml_b);
        CsvFile sol(dir / "solution.csv", "z,value,method,est_error");
        CsvFile diag(dir / "diagnostics.csv", "metric,value");
        for (double z : cfg.ml_z) {
            const MlEval e = ml(cfg.ml_alpha, cfg.ml_b, z);
            sol.row({csv_double(z), csv_double(e.value),
                     e.method == MlEval::Method::series ? "series" : "integral",
                     csv_double(e.est_error)});
            diag.metric("family_consistency_" + csv_double(z),
                        std::abs(fam(z) - e.value));
        }
        diag.metric("rows", static_cast<double>(cfg.ml_z.size()));
        write_manifest(dir, cfg, {"solution.csv", "diagnostics.csv"});
        note("ml-table: " + std::to_string(cfg.ml_z.size()) + " rows");
        return;
    }

    if (cfg.kind == "convergence") {
        std::vector<ConvergenceRow> partial;
        try {
            const auto rows = convergence_study(cfg, levels, &partial);
            write_convergence_csv(dir / "solution.csv", rows);
            CsvFile diag(dir / "diagnostics.csv", "metric,value");
            diag.metric("levels", rows.size());
            diag.metric("fitted_order", fitted_order(rows));
            write_manifest(dir, cfg, {"solution.csv", "diagnostics.csv"});
            note("convergence: fitted order " +
                 std::to_string(fitted_order(rows)));
        } catch (...) {
            // preserve the partial table before propagating the failure
            write_convergence_csv(dir / "solution.csv", partial);
            write_manifest(dir, cfg, {"solution.csv"});
            throw;
        }
        return;
    }

    if (cfg.kind == "heat") {
        const LinearProblem p = build_linear(cfg);
        SpaceTimeField u;
        if (cfg.scheme == "mild")
            u = solve_heat_mild(p);
        else if (cfg.scheme == "classical")
            u = solve_heat_classical(p);
        else
            u = solve_heat_l1(p);
        write_solution_csv(dir / "solution.csv", u);
        CsvFile diag(dir / "diagnostics.csv", "metric,value");
        diag.metric("max_principle_gap", max_principle_gap(u, p));
        diag.metric("sup_norm", u.max_abs());
        diag.metric("final_mean", u.snapshots.back().mean());
        write_manifest(dir, cfg, {"solution.csv", "diagnostics.csv"});
        note("heat: sup norm " + std::to_string(u.max_abs()));
        return;
    }

    if (cfg.kind == "hj") {
        const HjProblem p = build_hj(cfg);
        const HjRun r = run_hj(cfg, p);
        write_solution_csv(dir / "solution.csv", r.u);
        CsvFile diag(dir / "diagnostics.csv", "metric,value");
        if (!r.continued) picard_diagnostics(diag, r.trace);
        diag.metric("comparison_bound_gap", comparison_bound_gap(r.u, p));
        diag.metric("hj_residual", hj_residual(r.u, p));
        diag.metric("grad_l2", gradient_lp_norm(r.u, 2.0));
        diag.metric("grad_l4", gradient_lp_norm(r.u, 4.0));
        diag.metric("grad_l8", gradient_lp_norm(r.u, 8.0));
        write_manifest(dir, cfg, {"solution.csv", "diagnostics.csv"});
        note("hj: sup norm " + std::to_string(r.u.max_abs()));
        return;
    }

    if (cfg.kind == "fp") {
        const FpProblem p = build_fp(cfg, nullptr);
        const FpScheme scheme =
            cfg.scheme == "upwind" ? FpScheme::upwind : FpScheme::spectral;
        const SpaceTimeField rho = solve_fp_backward(p, scheme);
        write_solution_csv(dir / "solution.csv", rho);
        CsvFile diag(dir / "diagnostics.csv", "metric,value");
        diag.metric("mass_deviation", mass_deviation(rho));
        double min_v = 0.0;
        for (const auto& s : rho.snapshots)
            for (double v : s.values) min_v = std::min(min_v, v);
        diag.metric("min_value", min_v);
        write_manifest(dir, cfg, {"solution.csv", "diagnostics.csv"});
        note("fp: mass deviation " + std::to_string(mass_deviation(rho)));
        return;
    }

    // duality
    const HjProblem hp = build_hj(cfg);
    const HjRun hr = run_hj(cfg, hp);
    std::vector<SpaceTimeField> b(hp.grid.dim);
    for (int d = 0; d < hp.grid.dim; ++d) b[d].tgrid = hp.tgrid;
    for (const auto& snap : hr.u.snapshots) {
        const auto drift = hamiltonian_drift(hp.H, snap);
        for (int d = 0; d < hp.grid.dim; ++d)
            b[d].snapshots.push_back(drift[d]);
    }
    const FpProblem fp = build_fp(cfg, &b);
    const FpScheme scheme =
        cfg.scheme == "upwind" ? FpScheme::upwind : FpScheme::spectral;
    const SpaceTimeField rho = solve_fp_backward(fp, scheme);
    write_solution_csv(dir / "solution.csv", hr.u);
    CsvFile diag(dir / "diagnostics.csv", "metric,value");
    if (!hr.continued) picard_diagnostics(diag, hr.trace);
    diag.metric("duality_residual", duality_residual(hr.u, rho, hp));
    diag.metric("crossed_quantity", crossed_quantity(hr.u, rho, hp.H.gamma));
    diag.metric("mass_deviation", mass_deviation(rho));
    write_manifest(dir, cfg, {"solution.csv", "diagnostics.csv"});
    note("duality: residual " +
         std::to_string(duality_residual(hr.u, rho, hp)));
}

}  // namespace fracthj
