#pragma once

#include <vector>

namespace fracthj {

/// Partition of [0, T] carrying the fractional order beta in (0,1).
/// grading_exponent = 1 gives equispaced nodes; r > 1 clusters nodes at
/// t = 0 via t_n = T (n/M)^r to resolve the t^beta initial layer.
struct TimeGrid {
    double t_final = 1.0;
    int steps = 1;
    double beta = 0.5;
    double grading_exponent = 1.0;
    std::vector<double> nodes;  // size steps + 1, nodes[0] = 0, nodes[M] = T

    static TimeGrid uniform(double t_final, int steps, double beta);
    static TimeGrid graded(double t_final, int steps, double beta, double r);

    bool is_uniform() const { return grading_exponent == 1.0; }
    double dt() const;  // uniform grids only

    void validate() const;
};

/// Scalar series sampled at the grid nodes.
struct TimeSeries {
    TimeGrid grid;
    std::vector<double> values;  // size steps + 1
};

bool same_nodes(const TimeGrid& a, const TimeGrid& b);

}  // namespace fracthj
