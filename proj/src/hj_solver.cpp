#include "fracthj/hj_solver.hpp"

#include "fracthj/frac_calc.hpp"
#include "fracthj/special.hpp"

#include <algorithm>
#include <cmath>

namespace fracthj {

void HjProblem::validate() const {
    grid.validate();
    tgrid.validate();
    if (!(sigma > 0.0)) throw config_error("HjProblem: sigma must be positive");
    if (!(tol > 0.0)) throw config_error("HjProblem: tol must be positive");
    if (max_picard < 1) throw config_error("HjProblem: max_picard >= 1");
    if (!(u0.grid == grid)) throw config_error("HjProblem: u0 grid mismatch");
    if (!same_nodes(V.tgrid, tgrid) ||
        static_cast<int>(V.snapshots.size()) != tgrid.steps + 1)
        throw config_error("HjProblem: V time grid mismatch");
    for (const auto& f : V.snapshots)
        if (!(f.grid == grid)) throw config_error("HjProblem: V grid mismatch");
}

namespace {

double sup_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.snapshots.size(); ++i)
        for (size_t j = 0; j < a.snapshots[i].values.size(); ++j)
            m = std::max(m, std::abs(a.snapshots[i].values[j] -
                                     b.snapshots[i].values[j]));
    return m;
}

std::vector<double> trapezoid_weights(const std::vector<double>& nodes) {
    const int M = static_cast<int>(nodes.size()) - 1;
    std::vector<double> w(M + 1, 0.0);
    for (int m = 0; m < M; ++m) {
        const double h = 0.5 * (nodes[m + 1] - nodes[m]);
        w[m] += h;
        w[m + 1] += h;
    }
    return w;
}

double l2_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    const auto w = trapezoid_weights(a.tgrid.nodes);
    double s = 0.0;
    for (size_t m = 0; m < a.snapshots.size(); ++m) {
        double cell = 0.0;
        for (size_t j = 0; j < a.snapshots[m].values.size(); ++j) {
            const double d = a.snapshots[m].values[j] - b.snapshots[m].values[j];
            cell += d * d;
        }
        s += w[m] * cell / static_cast<double>(a.snapshots[m].values.size());
    }
    return std::sqrt(s);
}

}  // namespace

HjSolution solve_hj_picard(const HjProblem& p,
                           const std::optional<SpaceTimeField>& initial_guess,
                           int pin_count, const std::vector<Field>* pinned) {
    p.validate();
    const int M = p.tgrid.steps;

    SpaceTimeField z;
    if (initial_guess) {
        if (!same_nodes(initial_guess->tgrid, p.tgrid))
            throw config_error("solve_hj_picard: initial guess grid mismatch");
        z = *initial_guess;
    } else {
        z.tgrid = p.tgrid;
        z.snapshots.assign(M + 1, p.u0);
    }

    LinearProblem lin;
    lin.grid = p.grid;
    lin.tgrid = p.tgrid;
    lin.sigma = p.sigma;
    lin.u0 = p.u0;
    lin.source = SpaceTimeField{p.tgrid, std::vector<Field>(M + 1, Field::zeros(p.grid))};

    PicardTrace trace;
    const double stop = p.tol * std::max(1.0, p.u0.max_abs());
    int rising = 0;

    for (int it = 0; it < p.max_picard; ++it) {
        for (int m = 0; m <= M; ++m) {
            const Field hval = hamiltonian_of_gradient(p.H, z.snapshots[m]);
            Field& s = lin.source->snapshots[m];
            for (int j = 0; j < p.grid.size(); ++j)
                s.values[j] = p.V.snapshots[m].values[j] - hval.values[j];
        }
        SpaceTimeField w = solve_heat_l1(lin);
        if (pinned)
            for (int m = 0; m <= std::min(pin_count, M); ++m)
                w.snapshots[m] = (*pinned)[m];

        const double ds = sup_diff(w, z);
        trace.delta_sup.push_back(ds);
        trace.delta_l2.push_back(l2_diff(w, z));
        trace.iterations = it + 1;
        if (trace.delta_sup.size() >= 2) {
            const double prev = trace.delta_sup[trace.delta_sup.size() - 2];
            const double ratio = prev > 0.0 ? ds / prev : 0.0;
            trace.ratios.push_back(ratio);
            rising = ratio >= 1.0 ? rising + 1 : 0;
            if (rising >= 3)
                throw picard_divergence(
                    "solve_hj_picard: no contraction (ratio >= 1 three times)",
                    trace, p.tgrid.t_final);
        }
        z = std::move(w);
        if (ds <= stop) {
            trace.converged = true;
            break;
        }
    }
    return {std::move(z), std::move(trace)};
}

namespace {

// leading [0, t_{count}] piece of a grid / field sequence
TimeGrid prefix_grid(const TimeGrid& g, int count) {
    TimeGrid out = g;
    out.steps = count;
    out.t_final = g.nodes[count];
    out.nodes.assign(g.nodes.begin(), g.nodes.begin() + count + 1);
    return out;
}

SpaceTimeField prefix_field(const SpaceTimeField& f, int count) {
    SpaceTimeField out;
    out.tgrid = prefix_grid(f.tgrid, count);
    out.snapshots.assign(f.snapshots.begin(), f.snapshots.begin() + count + 1);
    return out;
}

}  // namespace

SpaceTimeField solve_hj_continued(const HjProblem& p, double window) {
    p.validate();
    if (!(window > 0.0) || window > p.tgrid.t_final + 1e-12)
        throw config_error("solve_hj_continued: window must lie in (0, t_final]");
    const int M = p.tgrid.steps;
    int win_nodes = std::max(
        4, static_cast<int>(std::lround(M * window / p.tgrid.t_final)));

    std::vector<Field> accepted;  // solution nodes accepted so far
    int reached = 0;

    while (reached < M) {
        const int target = std::min(reached + win_nodes, M);
        HjProblem sub = p;
        sub.tgrid = prefix_grid(p.tgrid, target);
        sub.V = prefix_field(p.V, target);
        try {
            std::optional<SpaceTimeField> guess;
            if (reached > 0) {
                // extend the accepted solution by its last snapshot
                SpaceTimeField g;
                g.tgrid = sub.tgrid;
                g.snapshots = accepted;
                g.snapshots.resize(target + 1, accepted.back());
                guess = std::move(g);
            }
            const HjSolution sol =
                solve_hj_picard(sub, guess, reached,
                                reached > 0 ? &accepted : nullptr);
            if (!sol.trace.converged)
                throw picard_divergence("solve_hj_continued: window hit max_picard",
                                        sol.trace, sub.tgrid.t_final);
            accepted = sol.u.snapshots;
            reached = target;
        } catch (const picard_divergence& e) {
            if (win_nodes <= 4)
                throw picard_divergence(
                    "solve_hj_continued: smallest window failed at t = " +
                        std::to_string(p.tgrid.nodes[reached]),
                    e.trace, p.tgrid.nodes[reached]);
            win_nodes = std::max(4, win_nodes / 2);
        }
    }
    SpaceTimeField out;
    out.tgrid = p.tgrid;
    out.snapshots = std::move(accepted);
    return out;
}

double comparison_bound_gap(const SpaceTimeField& u, const HjProblem& p) {
    double h0 = 0.0;
    for (int i = 0; i < p.grid.size(); ++i)
        h0 = std::max(h0, std::abs(p.H(i, {0.0, 0.0})));
    const double bound =
        p.u0.max_abs() + std::pow(p.tgrid.t_final, p.tgrid.beta) /
                             gamma_fn(1.0 + p.tgrid.beta) *
                             (p.V.max_abs() + h0);
    return u.max_abs() - bound;
}

double gradient_lp_norm(const SpaceTimeField& u, double p_exp) {
    if (!(p_exp >= 1.0)) throw config_error("gradient_lp_norm: p >= 1");
    const auto w = trapezoid_weights(u.tgrid.nodes);
    double s = 0.0;
    for (size_t m = 0; m < u.snapshots.size(); ++m) {
        const auto grad = gradient(u.snapshots[m]);
        double cell = 0.0;
        for (size_t j = 0; j < u.snapshots[m].values.size(); ++j) {
            double g2 = 0.0;
            for (const auto& gc : grad) g2 += gc.values[j] * gc.values[j];
            cell += std::pow(g2, 0.5 * p_exp);
        }
        s += w[m] * cell / static_cast<double>(u.snapshots[m].values.size());
    }
    return std::pow(s, 1.0 / p_exp);
}

double hj_residual(const SpaceTimeField& u, const HjProblem& p) {
    const int M = u.tgrid.steps;
    const auto& nodes = u.tgrid.nodes;
    double worst = 0.0;
    for (int m = 1; m <= M; ++m) {
        const auto w = caputo_node_weights(nodes, u.tgrid.beta, m);
        Field acc = Field::zeros(p.grid);
        for (int i = 0; i <= m; ++i) {
            if (w[i] == 0.0) continue;
            for (int j = 0; j < p.grid.size(); ++j)
                acc.values[j] += w[i] * u.snapshots[i].values[j];
        }
        const Field lap = laplacian_apply(u.snapshots[m], p.sigma);
        const Field hval = hamiltonian_of_gradient(p.H, u.snapshots[m]);
        for (int j = 0; j < p.grid.size(); ++j) {
            const double r = acc.values[j] - lap.values[j] + hval.values[j] -
                             p.V.snapshots[m].values[j];
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

}  // namespace fracthj
