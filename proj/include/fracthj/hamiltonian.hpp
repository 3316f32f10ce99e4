#pragma once

#include "fracthj/torus.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace fracthj {

/// H(x,p) with its p-gradient, evaluated pointwise. Built-in kinds:
///   quadratic: H(x,p) = h(x) |p|^2
///   power:     H(x,p) = h(x) { (1+|p|^2)^{gamma/2} - 1 }
/// Both are normalized so H(x,0) = 0 and H >= 0 for positive h.
struct Hamiltonian {
    enum class Kind { quadratic, power, custom };
    Kind kind = Kind::quadratic;
    double gamma = 2.0;      // growth exponent (> 1)
    Field coefficient;       // h(x), strictly positive for built-in kinds

    // custom evaluators (used when kind == custom); x is the flat grid index
    std::function<double(int, std::array<double, 2>)> custom_h;
    std::function<std::array<double, 2>(int, std::array<double, 2>)> custom_grad;

    double operator()(int flat, std::array<double, 2> p) const;
    std::array<double, 2> grad_p(int flat, std::array<double, 2> p) const;
};

/// Validates positivity/growth and checks grad_p against centered finite
/// differences of H on sampled (x, p).
Hamiltonian make_hamiltonian(Hamiltonian::Kind kind, double gamma,
                             const Field& coefficient);

/// Margins of the structural conditions on sampled (x, p), |p| <= 10:
///   coercivity       D_pH . p - H >= C_H |p|^gamma - c_H
///   growth of H      |H(x,p)| <= C_H^up (|p|^gamma + 1)
///   growth of D_pH   |D_pH(x,p)| <= C_tilde (|p|^{gamma-1} + 1)
///   nonnegativity    H(x,p) >= H(x,0) = 0
///   x-regularity     |H(x,p) - H(y,p)| <= L dist(x,y) (|p|^gamma + 1)
/// Fitted constants are the smallest admissible over the samples; a negative
/// margin marks a violated condition.
struct AssumptionReport {
    double gamma;
    double coercivity_C = 0.0, coercivity_c = 0.0, coercivity_margin = 0.0;
    double growth_C = 0.0, growth_margin = 0.0;
    double grad_growth_C = 0.0, grad_growth_margin = 0.0;
    double nonneg_margin = 0.0;
    double x_lipschitz = 0.0, x_lipschitz_margin = 0.0;

    bool all_hold() const;
};

AssumptionReport check_structural_assumptions(const Hamiltonian& H,
                                              const TorusGrid& grid,
                                              int sample_count);

/// H(x, Du) evaluated pseudo-spectrally with dealiasing; grad is the spectral
/// gradient of u.
Field hamiltonian_of_gradient(const Hamiltonian& H, const Field& u);

/// D_pH(x, Du), one component per dimension (the adjoint drift).
std::vector<Field> hamiltonian_drift(const Hamiltonian& H, const Field& u);

/// D_pH(x,Du) . Du - H(x,Du), the Legendre-type integrand of the duality
/// identity.
Field hamiltonian_excess(const Hamiltonian& H, const Field& u);

}  // namespace fracthj
