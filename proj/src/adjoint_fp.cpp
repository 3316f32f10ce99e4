#include "fracthj/adjoint_fp.hpp"

#include "fracthj/errors.hpp"
#include "fracthj/frac_calc.hpp"
#include "fracthj/special.hpp"

#include <algorithm>
#include <cmath>

namespace fracthj {

void FpProblem::validate() const {
    grid.validate();
    tgrid.validate();
    if (!(sigma > 0.0)) throw config_error("FpProblem: sigma must be positive");
    if (!(terminal.grid == grid)) throw config_error("FpProblem: terminal grid mismatch");
    double mass = 0.0, mn = 0.0;
    for (double v : terminal.values) {
        mass += v;
        mn = std::min(mn, v);
    }
    mass /= static_cast<double>(grid.size());
    if (mn < 0.0)
        throw config_error("FpProblem: terminal density must be nonnegative");
    if (std::abs(mass - 1.0) > 1e-12)
        throw config_error("FpProblem: terminal density must have unit mass");
    if (drift) {
        if (static_cast<int>(drift->size()) != grid.dim)
            throw config_error("FpProblem: drift needs one component per dimension");
        for (const auto& comp : *drift) {
            if (!same_nodes(comp.tgrid, tgrid))
                throw config_error("FpProblem: drift time grid mismatch");
            for (const auto& f : comp.snapshots) {
                if (!(f.grid == grid)) throw config_error("FpProblem: drift grid mismatch");
                for (double v : f.values)
                    if (!std::isfinite(v))
                        throw config_error("FpProblem: drift must be finite");
            }
        }
    }
}

namespace {

bool drift_is_zero(const FpProblem& p) {
    if (!p.drift) return true;
    for (const auto& comp : *p.drift)
        for (const auto& f : comp.snapshots)
            if (f.max_abs() != 0.0) return false;
    return true;
}

// finite-difference Laplacian symbol (periodic second differences)
std::vector<double> fd_laplacian_symbol(const TorusGrid& g) {
    std::vector<double> lam(g.size(), 0.0);
    const double h2 = g.spacing() * g.spacing();
    auto one = [&](int j) {
        return 2.0 * (1.0 - std::cos(2.0 * M_PI * j / g.n)) / h2;
    };
    for (int i = 0; i < g.size(); ++i) {
        if (g.dim == 1)
            lam[i] = one(i);
        else
            lam[i] = one(i / g.n) + one(i % g.n);
    }
    return lam;
}

// donor-cell divergence of the advective flux w m (conservative form);
// also reports the positivity-limiting outflow rate max_i sum(|outflow|)/h
Field upwind_flux_divergence(const std::vector<Field>& w, const Field& m,
                             double* outflow_rate) {
    const TorusGrid g = m.grid;
    const double h = g.spacing();
    Field div = Field::zeros(g);
    std::vector<double> outflow(g.size(), 0.0);
    auto face = [&](int left, int right, int d) {
        // flux through the face between cells left|right along dimension d
        const double wf = 0.5 * (w[d].values[left] + w[d].values[right]);
        const double flux =
            wf >= 0.0 ? wf * m.values[left] : wf * m.values[right];
        div.values[left] -= flux / h;
        div.values[right] += flux / h;
        if (wf >= 0.0)
            outflow[left] += wf / h;
        else
            outflow[right] += -wf / h;
    };
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) face(i, (i + 1) % g.n, 0);
    } else {
        for (int r = 0; r < g.n; ++r)
            for (int c = 0; c < g.n; ++c) {
                const int i = r * g.n + c;
                face(i, r * g.n + (c + 1) % g.n, 1);
                face(i, ((r + 1) % g.n) * g.n + c, 0);
            }
    }
    if (outflow_rate) {
        double worst = 0.0;
        for (double v : outflow) worst = std::max(worst, v);
        *outflow_rate = worst;
    }
    return div;
}

// spectral divergence of the pointwise product w m (dealiased); mode 0 is
// exactly zero, so the discrete mass is conserved to roundoff
Field spectral_flux_divergence(const std::vector<Field>& w, const Field& m) {
    std::vector<Field> prod;
    prod.reserve(w.size());
    for (const auto& comp : w) prod.push_back(dealiased_product(comp, m));
    return divergence(std::span<const Field>(prod.data(), prod.size()));
}

// drift evaluated in reversed time: b~(x, s_j) = b(x, t_{M-j})
std::vector<Field> reversed_drift(const FpProblem& p, int node) {
    std::vector<Field> out;
    const int M = p.tgrid.steps;
    for (const auto& comp : *p.drift) out.push_back(comp.snapshots[M - node]);
    return out;
}

// exact per-mode Mittag-Leffler propagation of the terminal data (no drift)
SpaceTimeField propagate_mild_reversed(const FpProblem& p) {
    LinearProblem lin;
    lin.grid = p.grid;
    lin.tgrid = p.tgrid;
    lin.sigma = p.sigma;
    lin.u0 = p.terminal;
    const SpaceTimeField m = solve_heat_mild(lin);
    SpaceTimeField out;
    out.tgrid = p.tgrid;
    const int M = p.tgrid.steps;
    out.snapshots.resize(M + 1, Field::zeros(p.grid));
    for (int j = 0; j <= M; ++j) out.snapshots[j] = m.snapshots[M - j];
    return out;
}

}  // namespace

SpaceTimeField solve_fp_backward(const FpProblem& p, FpScheme scheme) {
    p.validate();
    const int M = p.tgrid.steps;
    const double beta = p.tgrid.beta;
    const auto& nodes = p.tgrid.nodes;

    if (drift_is_zero(p) && scheme == FpScheme::spectral)
        return propagate_mild_reversed(p);

    const auto lam = scheme == FpScheme::spectral ? laplacian_symbol(p.grid)
                                                  : fd_laplacian_symbol(p.grid);
    const int total = p.grid.size();

    // reversed-time march: d^beta m = sigma Lap m + div(b~ m), m(0) = rho_tau
    std::vector<Field> m(M + 1, Field::zeros(p.grid));
    m[0] = p.terminal;
    std::vector<SpectralField> mh(M + 1);
    mh[0] = transform(p.terminal);

    for (int n = 1; n <= M; ++n) {
        const auto w = caputo_node_weights(nodes, beta, n);

        Field expl = Field::zeros(p.grid);
        if (!drift_is_zero(p)) {
            const auto b = reversed_drift(p, n - 1);
            if (scheme == FpScheme::spectral) {
                expl = spectral_flux_divergence(b, m[n - 1]);
            } else {
                double outflow = 0.0;
                expl = upwind_flux_divergence(b, m[n - 1], &outflow);
                // keeping the update a positive combination requires the
                // lagged-node history coefficient to dominate the outflow
                const double keep = -w[n - 1];
                if (outflow > keep) {
                    const double c =
                        (2.0 - std::pow(2.0, 1.0 - beta)) / gamma_fn(2.0 - beta);
                    const double admissible =
                        std::pow(c / outflow, 1.0 / beta);
                    throw step_restriction_error(
                        "solve_fp_backward: upwind positivity needs dt <= " +
                            std::to_string(admissible),
                        admissible);
                }
            }
        }

        SpectralField rhs = transform(expl);
        for (int i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            for (int k = 0; k < total; ++k) rhs.coeff[k] -= w[i] * mh[i].coeff[k];
        }
        SpectralField cur;
        cur.grid = p.grid;
        cur.coeff.resize(total);
        for (int k = 0; k < total; ++k)
            cur.coeff[k] = rhs.coeff[k] / (w[n] + p.sigma * lam[k]);
        mh[n] = cur;
        m[n] = inverse_transform(cur);
    }

    SpaceTimeField out;
    out.tgrid = p.tgrid;
    out.snapshots.resize(M + 1, Field::zeros(p.grid));
    for (int j = 0; j <= M; ++j) out.snapshots[j] = m[M - j];
    return out;
}

SpaceTimeField solve_fp_backward_nonconservative(const FpProblem& p) {
    p.validate();
    const int M = p.tgrid.steps;
    const double beta = p.tgrid.beta;
    const auto& nodes = p.tgrid.nodes;
    const auto lam = fd_laplacian_symbol(p.grid);
    const int total = p.grid.size();
    const double h = p.grid.spacing();

    std::vector<Field> m(M + 1, Field::zeros(p.grid));
    m[0] = p.terminal;
    std::vector<SpectralField> mh(M + 1);
    mh[0] = transform(p.terminal);

    for (int n = 1; n <= M; ++n) {
        const auto w = caputo_node_weights(nodes, beta, n);
        // non-conservative advective form b . Dm by one-sided differences:
        // drops the m div b part, so mass drifts for non-constant b
        Field expl = Field::zeros(p.grid);
        if (p.drift) {
            const auto b = reversed_drift(p, n - 1);
            for (int i = 0; i < total; ++i) {
                for (int d = 0; d < p.grid.dim; ++d) {
                    int fwd, bwd;
                    if (p.grid.dim == 1) {
                        fwd = (i + 1) % p.grid.n;
                        bwd = (i - 1 + p.grid.n) % p.grid.n;
                    } else if (d == 0) {
                        fwd = ((i / p.grid.n + 1) % p.grid.n) * p.grid.n + i % p.grid.n;
                        bwd = ((i / p.grid.n - 1 + p.grid.n) % p.grid.n) * p.grid.n +
                              i % p.grid.n;
                    } else {
                        fwd = (i / p.grid.n) * p.grid.n + (i % p.grid.n + 1) % p.grid.n;
                        bwd = (i / p.grid.n) * p.grid.n +
                              (i % p.grid.n - 1 + p.grid.n) % p.grid.n;
                    }
                    const double bi = b[d].values[i];
                    const double dm =
                        bi >= 0.0 ? (m[n - 1].values[i] - m[n - 1].values[bwd]) / h
                                  : (m[n - 1].values[fwd] - m[n - 1].values[i]) / h;
                    expl.values[i] += bi * dm;
                }
            }
        }
        SpectralField rhs = transform(expl);
        for (int i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            for (int k = 0; k < total; ++k) rhs.coeff[k] -= w[i] * mh[i].coeff[k];
        }
        SpectralField cur;
        cur.grid = p.grid;
        cur.coeff.resize(total);
        for (int k = 0; k < total; ++k)
            cur.coeff[k] = rhs.coeff[k] / (w[n] + p.sigma * lam[k]);
        mh[n] = cur;
        m[n] = inverse_transform(cur);
    }

    SpaceTimeField out;
    out.tgrid = p.tgrid;
    out.snapshots.resize(M + 1, Field::zeros(p.grid));
    for (int j = 0; j <= M; ++j) out.snapshots[j] = m[M - j];
    return out;
}

double mass_deviation(const SpaceTimeField& rho) {
    const double ref = rho.snapshots.back().mean();
    double worst = 0.0;
    for (const auto& f : rho.snapshots)
        worst = std::max(worst, std::abs(f.mean() - ref));
    return worst;
}

double crossed_quantity(const SpaceTimeField& u, const SpaceTimeField& rho,
                        double gamma) {
    if (!same_nodes(u.tgrid, rho.tgrid))
        throw config_error("crossed_quantity: time grid mismatch");
    const auto& nodes = u.tgrid.nodes;
    const int M = u.tgrid.steps;
    double total = 0.0;
    for (int m = 0; m <= M; ++m) {
        const auto grad = gradient(u.snapshots[m]);
        double cell = 0.0;
        for (size_t j = 0; j < u.snapshots[m].values.size(); ++j) {
            double g2 = 0.0;
            for (const auto& gc : grad) g2 += gc.values[j] * gc.values[j];
            cell += std::pow(g2, 0.5 * gamma) * rho.snapshots[m].values[j];
        }
        cell /= static_cast<double>(u.snapshots[m].values.size());
        double wt = 0.0;
        if (m > 0) wt += 0.5 * (nodes[m] - nodes[m - 1]);
        if (m < M) wt += 0.5 * (nodes[m + 1] - nodes[m]);
        total += wt * cell;
    }
    return total;
}

double duality_residual(const SpaceTimeField& u, const SpaceTimeField& rho,
                        const HjProblem& prob) {
    if (!same_nodes(u.tgrid, rho.tgrid))
        throw config_error("duality_residual: time grid mismatch");
    const int M = u.tgrid.steps;
    const int total = prob.grid.size();
    const double beta = u.tgrid.beta;

    // boundary terms: pointwise fractional integrals in time
    const auto wf = rl_node_weights(u.tgrid.nodes, 1.0 - beta, M, Direction::forward);
    const auto wb = rl_node_weights(u.tgrid.nodes, 1.0 - beta, 0, Direction::backward);
    double lhs = 0.0, rhs0 = 0.0;
    for (int j = 0; j < total; ++j) {
        double iu = 0.0, ir = 0.0;
        for (int m = 0; m <= M; ++m) {
            iu += wf[m] * u.snapshots[m].values[j];
            ir += wb[m] * rho.snapshots[m].values[j];
        }
        lhs += iu * rho.snapshots[M].values[j];
        rhs0 += u.snapshots[0].values[j] * ir;
    }
    lhs /= total;
    rhs0 /= total;

    // bulk terms: trapezoid in time of spatial means
    const auto& nodes = u.tgrid.nodes;
    double bulk = 0.0;
    for (int m = 0; m <= M; ++m) {
        const Field ex = hamiltonian_excess(prob.H, u.snapshots[m]);
        double cell = 0.0;
        for (int j = 0; j < total; ++j)
            cell += (prob.V.snapshots[m].values[j] + ex.values[j]) *
                    rho.snapshots[m].values[j];
        cell /= total;
        double wt = 0.0;
        if (m > 0) wt += 0.5 * (nodes[m] - nodes[m - 1]);
        if (m < M) wt += 0.5 * (nodes[m + 1] - nodes[m]);
        bulk += wt * cell;
    }
    return std::abs(lhs - (rhs0 + bulk));
}

}  // namespace fracthj
