#include "fracthj/frac_calc.hpp"
#include "fracthj/errors.hpp"
#include "fracthj/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracthj {

namespace {

bool nodes_uniform(const std::vector<double>& nodes) {
    if (nodes.size() < 3) return true;
    const double h0 = nodes[1] - nodes[0];
    for (size_t i = 1; i + 1 < nodes.size(); ++i)
        if (std::abs((nodes[i + 1] - nodes[i]) - h0) > 1e-12 * h0) return false;
    return true;
}

std::vector<double> reversed_nodes(const std::vector<double>& nodes, int tau_index) {
    std::vector<double> out(tau_index + 1);
    const double tau = nodes[tau_index];
    for (int i = 0; i <= tau_index; ++i) out[i] = tau - nodes[tau_index - i];
    return out;
}

}  // namespace

L1Weights l1_weights(double beta, int steps) {
    if (!(beta > 0.0 && beta < 1.0)) throw config_error("l1_weights: beta in (0,1)");
    if (steps < 1) throw config_error("l1_weights: steps >= 1");
    L1Weights w;
    w.beta = beta;
    w.coefficients.resize(steps);
    const double e = 1.0 - beta;
    for (int j = 0; j < steps; ++j)
        w.coefficients[j] = std::pow(j + 1.0, e) - std::pow(static_cast<double>(j), e);
    return w;
}

std::vector<double> caputo_node_weights(const std::vector<double>& nodes,
                                        double beta, int m) {
    if (!(beta > 0.0 && beta < 1.0)) throw config_error("caputo_node_weights: beta in (0,1)");
    if (m < 1 || m >= static_cast<int>(nodes.size()))
        throw config_error("caputo_node_weights: node index out of range");
    std::vector<double> w(nodes.size(), 0.0);
    const double g = gamma_fn(2.0 - beta);
    const double tm = nodes[m];
    const double e = 1.0 - beta;
    for (int j = 0; j < m; ++j) {
        const double h = nodes[j + 1] - nodes[j];
        const double c =
            (std::pow(tm - nodes[j], e) - std::pow(tm - nodes[j + 1], e)) / (h * g);
        w[j + 1] += c;
        w[j] -= c;
    }
    return w;
}

TimeSeries caputo_forward(const TimeSeries& u, double beta, bool allow_nonuniform) {
    const auto& nodes = u.grid.nodes;
    if (u.values.size() != nodes.size())
        throw config_error("caputo_forward: series length mismatch");
    if (!nodes_uniform(nodes) && !allow_nonuniform)
        throw config_error(
            "caputo_forward: nonuniform grid; pass allow_nonuniform for the "
            "graded scheme");
    TimeSeries out;
    out.grid = u.grid;
    out.values.assign(nodes.size(), std::numeric_limits<double>::quiet_NaN());
    const int M = static_cast<int>(nodes.size()) - 1;
    for (int m = 1; m <= M; ++m) {
        const auto w = caputo_node_weights(nodes, beta, m);
        double s = 0.0;
        for (int i = 0; i <= m; ++i) s += w[i] * u.values[i];
        out.values[m] = s;
    }
    return out;
}

TimeSeries caputo_backward(const TimeSeries& v, double beta, int tau_index,
                           bool allow_nonuniform) {
    const auto& nodes = v.grid.nodes;
    if (tau_index < 1 || tau_index >= static_cast<int>(nodes.size()))
        throw config_error("caputo_backward: tau index out of range");
    if (v.values.size() != nodes.size())
        throw config_error("caputo_backward: series length mismatch");
    TimeSeries rev;
    rev.grid = v.grid;
    rev.grid.steps = tau_index;
    rev.grid.t_final = nodes[tau_index];
    rev.grid.nodes = reversed_nodes(nodes, tau_index);
    rev.values.resize(tau_index + 1);
    for (int i = 0; i <= tau_index; ++i) rev.values[i] = v.values[tau_index - i];
    TimeSeries d = caputo_forward(rev, beta, allow_nonuniform);
    TimeSeries out;
    out.grid = v.grid;
    out.values.assign(nodes.size(), std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i <= tau_index; ++i) out.values[tau_index - i] = d.values[i];
    return out;
}

std::vector<double> rl_node_weights(const std::vector<double>& nodes, double order,
                                    int target, Direction dir, RlQuadrature quad) {
    if (!(order > 0.0 && order < 1.0))
        throw config_error("rl_node_weights: order in (0,1)");
    if (target < 0 || target >= static_cast<int>(nodes.size()))
        throw config_error("rl_node_weights: target out of range");
    std::vector<double> w(nodes.size(), 0.0);
    const double mu = order;
    const double inv_gamma = 1.0 / gamma_fn(mu);

    auto accumulate_forward = [&](const std::vector<double>& ns, int tgt,
                                  std::vector<double>& out) {
        const double t = ns[tgt];
        for (int j = 0; j < tgt; ++j) {
            const double a = ns[j], b = ns[j + 1], h = b - a;
            const double pa = std::pow(t - a, mu), pb = std::pow(t - b, mu);
            const double m0 = (pa - pb) / mu;
            if (quad == RlQuadrature::rectangle) {
                out[j] += inv_gamma * m0;  // left value on each cell
            } else {
                const double m1 =
                    t * m0 - (std::pow(t - a, mu + 1.0) - std::pow(t - b, mu + 1.0)) /
                                 (mu + 1.0);
                out[j] += inv_gamma * (b * m0 - m1) / h;
                out[j + 1] += inv_gamma * (m1 - a * m0) / h;
            }
        }
    };

    if (dir == Direction::forward) {
        accumulate_forward(nodes, target, w);
    } else {
        const int M = static_cast<int>(nodes.size()) - 1;
        const auto rev = reversed_nodes(nodes, M);
        std::vector<double> wr(nodes.size(), 0.0);
        accumulate_forward(rev, M - target, wr);
        for (int i = 0; i <= M; ++i) w[M - i] = wr[i];
    }
    return w;
}

TimeSeries rl_integral(const TimeSeries& u, double order, Direction dir,
                       RlQuadrature quad) {
    const auto& nodes = u.grid.nodes;
    if (u.values.size() != nodes.size())
        throw config_error("rl_integral: series length mismatch");
    TimeSeries out;
    out.grid = u.grid;
    out.values.assign(nodes.size(), 0.0);
    for (int m = 0; m < static_cast<int>(nodes.size()); ++m) {
        const auto w = rl_node_weights(nodes, order, m, dir, quad);
        double s = 0.0;
        for (size_t i = 0; i < w.size(); ++i) s += w[i] * u.values[i];
        out.values[m] = s;
    }
    return out;
}

double integration_by_parts_residual(const TimeSeries& u, const TimeSeries& v,
                                     double beta) {
    if (!same_nodes(u.grid, v.grid))
        throw config_error("integration_by_parts_residual: grid mismatch");
    const auto& nodes = u.grid.nodes;
    const int M = static_cast<int>(nodes.size()) - 1;
    const bool nonuni = !nodes_uniform(nodes);
    const TimeSeries du = caputo_forward(u, beta, nonuni);
    const TimeSeries dv = caputo_backward(v, beta, M, nonuni);
    const TimeSeries iu = rl_integral(u, 1.0 - beta, Direction::forward);
    const TimeSeries iv = rl_integral(v, 1.0 - beta, Direction::backward);

    // trapezoid over the nodes where the derivative exists, with a rectangle
    // patch on the end cell carrying the missing endpoint
    double lhs_int = 0.0, rhs_int = 0.0;
    for (int m = 1; m < M; ++m) {
        const double h = 0.5 * (nodes[m + 1] - nodes[m - 1]);
        lhs_int += h * v.values[m] * du.values[m];
        rhs_int += h * u.values[m] * dv.values[m];
    }
    lhs_int += 0.5 * (nodes[M] - nodes[M - 1]) * v.values[M] * du.values[M];
    lhs_int += 0.5 * (nodes[1] - nodes[0]) * v.values[1] * du.values[1];
    rhs_int += 0.5 * (nodes[1] - nodes[0]) * u.values[0] * dv.values[0];
    rhs_int += 0.5 * (nodes[M] - nodes[M - 1]) * u.values[M - 1] * dv.values[M - 1];

    const double lhs = lhs_int + u.values[0] * iv.values[0];
    const double rhs = rhs_int + v.values[M] * iu.values[M];
    return std::abs(lhs - rhs);
}

}  // namespace fracthj
