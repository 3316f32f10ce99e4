#pragma once

#include "fracthj/time_grid.hpp"
#include "fracthj/torus.hpp"

#include <optional>
#include <vector>

namespace fracthj {

/// Time-indexed sequence of spatial snapshots, one per time node.
struct SpaceTimeField {
    TimeGrid tgrid;
    std::vector<Field> snapshots;  // size steps + 1

    double max_abs() const;
};

/// d^beta u - sigma Lap u + b . Du = F,  u(0) = u0, on the torus.
struct LinearProblem {
    TorusGrid grid;
    TimeGrid tgrid;
    double sigma = 1.0;
    Field u0;
    std::optional<SpaceTimeField> source;             // F at the nodes
    std::optional<std::vector<SpaceTimeField>> drift; // b, one entry per dim

    void validate() const;
};

/// Mittag-Leffler propagator: per Fourier mode
///   u_hat(t) = E_beta(-lambda t^beta) u0_hat
///            + int_0^t w^{beta-1} E_{beta,beta}(-lambda w^beta) f_hat(t-w) dw
/// with the source integral evaluated by product integration that is exact
/// for f_hat piecewise linear in time. Drift is rejected (use solve_heat_l1);
/// a source requires a uniform time grid.
SpaceTimeField solve_heat_mild(const LinearProblem& p);

/// L1 time stepping: discrete Caputo history, implicit diffusion via the
/// spectral symbol, explicit (lagged) drift. Works on graded grids. Aborts
/// with stability_error when the iterate passes the blowup guard
/// 1e6 (||u0||_inf + ||F||_inf T^beta).
SpaceTimeField solve_heat_l1(const LinearProblem& p);

/// Classical backward Euler for d_t u - sigma Lap u + b . Du = F; the
/// beta -> 1 consistency reference (beta in the grid is ignored).
SpaceTimeField solve_heat_classical(const LinearProblem& p);

/// ||u||_inf - [||u0||_inf + T^beta/Gamma(1+beta) ||F||_inf]; a value <= 0
/// (up to scheme slack) certifies the sup-norm bound.
double max_principle_gap(const SpaceTimeField& u, const LinearProblem& p);

}  // namespace fracthj
