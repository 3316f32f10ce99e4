#pragma once

#include "fracthj/errors.hpp"
#include "fracthj/hamiltonian.hpp"
#include "fracthj/linear_solver.hpp"

#include <optional>

namespace fracthj {

/// d^beta u - sigma Lap u + H(x, Du) = V,  u(0) = u0.
struct HjProblem {
    TorusGrid grid;
    TimeGrid tgrid;
    double sigma = 1.0;
    Hamiltonian H;
    SpaceTimeField V;
    Field u0;
    double tol = 1e-8;
    int max_picard = 120;

    void validate() const;
};

/// Per-iteration update norms of the fixed-point map and their ratios.
struct PicardTrace {
    std::vector<double> delta_sup;  // ||z_{m+1} - z_m||_inf over Q_tau
    std::vector<double> delta_l2;   // discrete space-time L2 of the update
    std::vector<double> ratios;     // delta_{m+1} / delta_m
    bool converged = false;
    int iterations = 0;
};

/// Thrown when the iteration stops contracting (ratio >= 1 three times in a
/// row); carries the trace and the final time of the attempted solve.
struct picard_divergence : std::runtime_error {
    picard_divergence(const std::string& msg, PicardTrace t, double reached)
        : std::runtime_error(msg), trace(std::move(t)), time_reached(reached) {}
    PicardTrace trace;
    double time_reached;
};

struct HjSolution {
    SpaceTimeField u;
    PicardTrace trace;
};

/// Picard iteration w = Jz: each iterate solves the linear problem
/// d^beta w - sigma Lap w = V - H(x, Dz), w(0) = u0, via solve_heat_l1.
/// initial_guess overrides the default iterate z0 = u0 extended constant in
/// time (used by the uniqueness probe). pin_count > 0 freezes the first
/// pin_count+1 nodes of every iterate to the given fields (continuation).
HjSolution solve_hj_picard(const HjProblem& p,
                           const std::optional<SpaceTimeField>& initial_guess = {},
                           int pin_count = 0,
                           const std::vector<Field>* pinned = nullptr);

/// Windowed continuation: solve on [0, tau], extend to [0, tau + window] with
/// iterates pinned to the accepted solution on [0, tau], repeat to t_final.
/// The window is halved on non-contraction (floor: 4 time steps).
SpaceTimeField solve_hj_continued(const HjProblem& p, double window);

/// ||u||_inf - [||u0||_inf + T^beta/Gamma(1+beta) (||V||_inf + ||H(.,0)||_inf)].
double comparison_bound_gap(const SpaceTimeField& u, const HjProblem& p);

/// Discrete space-time L^p norm of |Du| (spectral gradient, trapezoid in
/// time).
double gradient_lp_norm(const SpaceTimeField& u, double p_exp);

/// Sup over interior nodes of |d^beta_h u - sigma Lap u + H(x,Du) - V| with
/// the same discrete operators the solver uses.
double hj_residual(const SpaceTimeField& u, const HjProblem& p);

}  // namespace fracthj
