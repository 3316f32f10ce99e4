#pragma once

#include "fracthj/hj_solver.hpp"
#include "fracthj/linear_solver.hpp"

#include <optional>

namespace fracthj {

/// Backward problem  d~^beta rho - sigma Lap rho - div(b rho) = 0 on [0,tau],
/// rho(tau) = terminal, with d~^beta acting from the terminal time.
struct FpProblem {
    TorusGrid grid;
    TimeGrid tgrid;  // forward nodes 0..tau
    double sigma = 1.0;
    std::optional<std::vector<SpaceTimeField>> drift;  // b(x,t), per dim
    Field terminal;  // rho_tau >= 0, unit mass

    void validate() const;
};

enum class FpScheme { spectral, upwind };

/// Time-reverses to a forward Caputo problem and marches with L1 history and
/// implicit diffusion. spectral: spectral divergence of the pointwise product
/// (mass exact, undershoots possible; zero drift routes through the exact
/// Mittag-Leffler propagator). upwind: donor-cell conservative fluxes with a
/// finite-difference Laplacian (mass exact, nonnegativity under the reported
/// step restriction). Snapshots are returned in forward time, rho(t).
SpaceTimeField solve_fp_backward(const FpProblem& p, FpScheme scheme);

/// max over nodes of |mass(rho(t)) - mass(rho_tau)|.
double mass_deviation(const SpaceTimeField& rho);

/// Deliberately non-conservative centered-advection variant; negative control
/// for the mass diagnostics.
SpaceTimeField solve_fp_backward_nonconservative(const FpProblem& p);

/// Space-time integral of |Du|^gamma rho (trapezoid in time).
double crossed_quantity(const SpaceTimeField& u, const SpaceTimeField& rho,
                        double gamma);

/// |LHS - RHS| of the duality identity
///   int (I^{1-b}u)(tau) rho_tau = int u(0) (I~^{1-b}rho)(0)
///       + intint V rho + intint (D_pH . Du - H) rho.
double duality_residual(const SpaceTimeField& u, const SpaceTimeField& rho,
                        const HjProblem& prob);

}  // namespace fracthj
