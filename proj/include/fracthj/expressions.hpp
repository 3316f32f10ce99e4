#pragma once

#include "fracthj/linear_solver.hpp"
#include "fracthj/torus.hpp"

#include <json.hpp>

#include <vector>

namespace fracthj {

/// One closed-form term c * t^q * f(x). f is 1, cos(2 pi k.x), sin(2 pi k.x),
/// or a smooth periodic bump prod_d exp((cos(2 pi (x_d - c_d)) - 1)/width^2)
/// (the Dirac-sequence fixture; never width -> 0).
struct ExprTerm {
    enum class Kind { constant, cosine, sine, bump };
    Kind kind = Kind::constant;
    double coef = 1.0;
    double t_power = 0.0;
    std::vector<int> mode;       // k, one entry per dimension (cos/sin)
    std::vector<double> center;  // bump center, per dimension
    double width = 0.1;          // bump width
};

struct Expression {
    std::vector<ExprTerm> terms;

    double eval(const double* x, int dim, double t) const;
    bool time_dependent() const;
};

/// Parses a JSON array of term objects. Recognized keys per term:
/// coef, t_power, trig ("const"|"cos"|"sin"|"bump"), mode, center, width.
/// Unknown keys are rejected.
Expression parse_expression(const nlohmann::json& j);

Field evaluate_field(const Expression& e, const TorusGrid& g, double t);
SpaceTimeField evaluate_spacetime(const Expression& e, const TorusGrid& g,
                                  const TimeGrid& tg);

}  // namespace fracthj
