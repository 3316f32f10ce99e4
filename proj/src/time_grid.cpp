#include "fracthj/time_grid.hpp"
#include "fracthj/errors.hpp"

#include <cmath>

namespace fracthj {

TimeGrid TimeGrid::uniform(double t_final, int steps, double beta) {
    return graded(t_final, steps, beta, 1.0);
}

TimeGrid TimeGrid::graded(double t_final, int steps, double beta, double r) {
    TimeGrid g;
    g.t_final = t_final;
    g.steps = steps;
    g.beta = beta;
    g.grading_exponent = r;
    g.validate();
    g.nodes.resize(steps + 1);
    for (int n = 0; n <= steps; ++n)
        g.nodes[n] = t_final * std::pow(static_cast<double>(n) / steps, r);
    g.nodes[steps] = t_final;
    return g;
}

double TimeGrid::dt() const {
    if (!is_uniform()) throw config_error("TimeGrid::dt: grid is not uniform");
    return t_final / steps;
}

void TimeGrid::validate() const {
    if (!(t_final > 0.0)) throw config_error("TimeGrid: t_final must be positive");
    if (steps < 1) throw config_error("TimeGrid: steps must be >= 1");
    if (!(beta > 0.0 && beta < 1.0))
        throw config_error("TimeGrid: beta must lie strictly in (0,1)");
    if (!(grading_exponent >= 1.0))
        throw config_error("TimeGrid: grading exponent must be >= 1");
}

bool same_nodes(const TimeGrid& a, const TimeGrid& b) {
    if (a.steps != b.steps || a.nodes.size() != b.nodes.size()) return false;
    for (size_t i = 0; i < a.nodes.size(); ++i)
        if (a.nodes[i] != b.nodes[i]) return false;
    return true;
}

}  // namespace fracthj
