#pragma once

#include "fracthj/time_grid.hpp"

#include <vector>

namespace fracthj {

/// L1 coefficients b_j = (j+1)^{1-beta} - j^{1-beta}, j = 0..M-1.
struct L1Weights {
    double beta;
    std::vector<double> coefficients;
};

L1Weights l1_weights(double beta, int steps);

enum class Direction { forward, backward };
enum class RlQuadrature { trapezoid, rectangle };

/// Node weights of the discrete Caputo derivative at node m:
/// (D^beta u)(t_m) = sum_i w[i] u_i. Valid on arbitrary increasing grids.
std::vector<double> caputo_node_weights(const std::vector<double>& nodes,
                                        double beta, int m);

/// L1 Caputo derivative of a scalar series. The value at t_0 has no
/// discrete meaning and is reported as NaN. Nonuniform grids are rejected
/// unless allow_nonuniform is set (graded-scheme support).
TimeSeries caputo_forward(const TimeSeries& u, double beta,
                          bool allow_nonuniform = false);

/// Backward Caputo derivative acting from node tau_index; exact mirror of
/// caputo_forward on the time-reversed data. Value at t_{tau} is NaN.
TimeSeries caputo_backward(const TimeSeries& v, double beta, int tau_index,
                           bool allow_nonuniform = false);

/// Node weights of the Riemann-Liouville integral I^order at target node,
/// by product integration of the weakly singular kernel (exact moments
/// against piecewise-linear or piecewise-constant data).
std::vector<double> rl_node_weights(const std::vector<double>& nodes,
                                    double order, int target, Direction dir,
                                    RlQuadrature quad = RlQuadrature::trapezoid);

/// Riemann-Liouville fractional integral of order in (0,1), forward
/// (from 0) or backward (from the final node).
TimeSeries rl_integral(const TimeSeries& u, double order, Direction dir,
                       RlQuadrature quad = RlQuadrature::trapezoid);

/// Residual |LHS - RHS| of the fractional integration-by-parts identity
///   int v d^b u + u(0) (I^{1-b} v)(0) = int u d~^b v + v(tau) (I^{1-b} u)(tau)
/// assembled with the discrete operators above and trapezoid time quadrature.
double integration_by_parts_residual(const TimeSeries& u, const TimeSeries& v,
                                     double beta);

}  // namespace fracthj
