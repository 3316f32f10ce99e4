#pragma once

#include <vector>

namespace fracthj {

/// Gamma function on the real line (poles at nonpositive integers rejected).
/// Lanczos approximation, relative error below 1e-13 on [0.1, 30].
double gamma_fn(double x);

/// log Gamma for x > 0.
double log_gamma(double x);

/// Result of a Mittag-Leffler evaluation E_{alpha,b}(z), z <= 0.
struct MlEval {
    double alpha;
    double b;
    double z;
    double value;
    enum class Method { series, integral } method;
    double est_error;
};

/// Evaluates the two-parameter Mittag-Leffler function E_{alpha,b}(z) for
/// alpha in (0,1], b > 0 and z <= 0.
///
/// Small |z| uses the Taylor series; beyond an alpha-dependent threshold the
/// value comes from an exponentially convergent real-axis integral (or the
/// asymptotic expansion once |z| is large enough), with b first reduced below
/// 1+alpha through the recurrence E_{a,B}(z) = (E_{a,B-a}(z) - 1/Gamma(B-a))/z.
MlEval ml(double alpha, double b, double z);

/// Fixed-parameter Mittag-Leffler evaluator. Precomputes the quadrature
/// tables for (alpha, b) once so repeated evaluations along z are cheap.
/// One instance per user; distinct instances are independent.
class MlFamily {
public:
    MlFamily(double alpha, double b);
    double operator()(double z) const;

private:
    double alpha_;
    double b_;            // as requested
    double b_reduced_;    // below 1 + alpha
    std::vector<double> recurrence_gammas_;  // 1/Gamma at each reduction step
    // trapezoid tables in s with u = exp(s): weight = h * exp(eps*s - u) / pi
    std::vector<double> quad_u_alpha_;   // u^alpha
    std::vector<double> quad_weight_;
    double sin_b_, sin_ba_, cos_pa_;
    double integral_eval(double x) const;
    double asymptotic_eval(double x, double b, bool& ok) const;
};

/// Moment of the Mainardi density: integral of t^r M_beta(t) over (0,inf),
/// equal to Gamma(r+1)/Gamma(beta*r+1).
double mainardi_moment(double beta, double r);

/// Independent verification of the moment identity: integrates the Mainardi
/// series in extended precision. Intended for beta in [0.3, 0.9], r in [0, 3].
double mainardi_moment_quadrature(double beta, double r);

/// Laplace transform of the Mainardi density at s >= 0, computed by
/// quadrature of the series. Equals E_beta(-s) (subordination identity).
double mainardi_laplace_quadrature(double beta, double s);

}  // namespace fracthj
