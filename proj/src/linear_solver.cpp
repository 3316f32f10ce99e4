#include "fracthj/linear_solver.hpp"

#include "fracthj/errors.hpp"
#include "fracthj/frac_calc.hpp"
#include "fracthj/special.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fracthj {

double SpaceTimeField::max_abs() const {
    double m = 0.0;
    for (const auto& f : snapshots) m = std::max(m, f.max_abs());
    return m;
}

void LinearProblem::validate() const {
    grid.validate();
    tgrid.validate();
    if (!(sigma > 0.0)) throw config_error("LinearProblem: sigma must be positive");
    if (!(u0.grid == grid)) throw config_error("LinearProblem: u0 grid mismatch");
    const int M = tgrid.steps;
    if (source) {
        if (!same_nodes(source->tgrid, tgrid) ||
            static_cast<int>(source->snapshots.size()) != M + 1)
            throw config_error("LinearProblem: source time grid mismatch");
        for (const auto& f : source->snapshots)
            if (!(f.grid == grid)) throw config_error("LinearProblem: source grid mismatch");
    }
    if (drift) {
        if (static_cast<int>(drift->size()) != grid.dim)
            throw config_error("LinearProblem: drift needs one component per dimension");
        for (const auto& comp : *drift) {
            if (!same_nodes(comp.tgrid, tgrid) ||
                static_cast<int>(comp.snapshots.size()) != M + 1)
                throw config_error("LinearProblem: drift time grid mismatch");
            for (const auto& f : comp.snapshots)
                if (!(f.grid == grid))
                    throw config_error("LinearProblem: drift grid mismatch");
        }
    }
}

namespace {

double source_max_abs(const LinearProblem& p) {
    if (!p.source) return 0.0;
    return p.source->max_abs();
}

// Per-eigenvalue node tables for the mild propagator. E0 is the homogeneous
// profile; G1, G2 are the first and second antiderivatives of the Duhamel
// kernel w^{beta-1} E_{beta,beta}(-lambda w^beta):
//   G1(t) = t^beta     E_{beta,beta+1}(-lambda t^beta)
//   G2(t) = t^{beta+1} E_{beta,beta+2}(-lambda t^beta)
struct ModeTables {
    std::vector<double> e0, g1, g2;
};

class MildTables {
public:
    MildTables(double beta, const std::vector<double>& nodes, bool with_source)
        : beta_(beta),
          nodes_(nodes),
          with_source_(with_source),
          fam0_(beta, 1.0),
          fam1_(beta, beta + 1.0),
          fam2_(beta, beta + 2.0) {}

    const ModeTables& for_lambda(double lambda) {
        auto it = cache_.find(lambda);
        if (it != cache_.end()) return it->second;
        ModeTables t;
        const size_t m = nodes_.size();
        t.e0.resize(m);
        if (with_source_) {
            t.g1.resize(m);
            t.g2.resize(m);
        }
        for (size_t j = 0; j < m; ++j) {
            const double tb = std::pow(nodes_[j], beta_);
            const double z = -lambda * tb;
            t.e0[j] = fam0_(z);
            if (with_source_) {
                t.g1[j] = tb * fam1_(z);
                t.g2[j] = tb * nodes_[j] * fam2_(z);
            }
        }
        return cache_.emplace(lambda, std::move(t)).first->second;
    }

private:
    double beta_;
    std::vector<double> nodes_;
    bool with_source_;
    MlFamily fam0_, fam1_, fam2_;
    std::map<double, ModeTables> cache_;
};

}  // namespace

SpaceTimeField solve_heat_mild(const LinearProblem& p) {
    p.validate();
    if (p.drift) throw config_error("solve_heat_mild: drift unsupported, use solve_heat_l1");
    const bool with_source = p.source.has_value();
    if (with_source && !p.tgrid.is_uniform())
        throw config_error("solve_heat_mild: sources require a uniform time grid");

    const int M = p.tgrid.steps;
    const double beta = p.tgrid.beta;
    const auto lam = laplacian_symbol(p.grid);
    const int total = p.grid.size();

    const SpectralField u0h = transform(p.u0);
    std::vector<SpectralField> fh;
    if (with_source) {
        fh.reserve(M + 1);
        for (const auto& f : p.source->snapshots) fh.push_back(transform(f));
    }

    MildTables tables(beta, p.tgrid.nodes, with_source);

    SpaceTimeField out;
    out.tgrid = p.tgrid;
    out.snapshots.assign(M + 1, Field::zeros(p.grid));
    out.snapshots[0] = p.u0;

    std::vector<SpectralField> uh(M + 1);
    for (int nn = 0; nn <= M; ++nn) {
        uh[nn].grid = p.grid;
        uh[nn].coeff.assign(total, 0.0);
    }

    for (int k = 0; k < total; ++k) {
        const ModeTables& t = tables.for_lambda(p.sigma * lam[k]);
        for (int nn = 1; nn <= M; ++nn) {
            std::complex<double> acc = t.e0[nn] * u0h.coeff[k];
            if (with_source) {
                const double tn = p.tgrid.nodes[nn];
                // sum of exact cell integrals against piecewise-linear f_hat
                for (int j = 0; j < nn; ++j) {
                    const double a = p.tgrid.nodes[j];
                    const double b = p.tgrid.nodes[j + 1];
                    const double h = b - a;
                    // f_hat(tn - w) is linear on w in [a, b]:
                    const std::complex<double> fa = fh[nn - j].coeff[k];
                    const std::complex<double> fb = fh[nn - j - 1].coeff[k];
                    const double m0 = t.g1[j + 1] - t.g1[j];
                    const double m1 = b * t.g1[j + 1] - a * t.g1[j] -
                                      (t.g2[j + 1] - t.g2[j]);
                    acc += fa * ((b * m0 - m1) / h) + fb * ((m1 - a * m0) / h);
                }
            }
            uh[nn].coeff[k] = acc;
        }
    }
    for (int nn = 1; nn <= M; ++nn) out.snapshots[nn] = inverse_transform(uh[nn]);
    return out;
}

namespace {

Field drift_term(const LinearProblem& p, const Field& u, int node) {
    const auto grad = gradient(u);
    Field out = Field::zeros(p.grid);
    for (int d = 0; d < p.grid.dim; ++d) {
        const Field& b = (*p.drift)[d].snapshots[node];
        for (int i = 0; i < p.grid.size(); ++i)
            out.values[i] += b.values[i] * grad[d].values[i];
    }
    return out;
}

}  // namespace

SpaceTimeField solve_heat_l1(const LinearProblem& p) {
    p.validate();
    const int M = p.tgrid.steps;
    const double beta = p.tgrid.beta;
    const auto& nodes = p.tgrid.nodes;
    const auto lam = laplacian_symbol(p.grid);
    const int total = p.grid.size();

    const double guard =
        1e6 * (p.u0.max_abs() + source_max_abs(p) * std::pow(p.tgrid.t_final, beta) +
               1e-300);

    SpaceTimeField out;
    out.tgrid = p.tgrid;
    out.snapshots.assign(M + 1, Field::zeros(p.grid));
    out.snapshots[0] = p.u0;

    std::vector<SpectralField> uh(M + 1);
    uh[0] = transform(p.u0);

    for (int m = 1; m <= M; ++m) {
        const auto w = caputo_node_weights(nodes, beta, m);
        // rhs_hat = F_m_hat - sum_{i<m} w_i u_i_hat - (b . Du)_{m-1}_hat
        SpectralField rhs;
        rhs.grid = p.grid;
        rhs.coeff.assign(total, 0.0);
        if (p.source) {
            const SpectralField fm = transform(p.source->snapshots[m]);
            rhs.coeff = fm.coeff;
        }
        for (int i = 0; i < m; ++i) {
            if (w[i] == 0.0) continue;
            for (int k = 0; k < total; ++k) rhs.coeff[k] -= w[i] * uh[i].coeff[k];
        }
        if (p.drift) {
            const SpectralField bh = transform(drift_term(p, out.snapshots[m - 1], m - 1));
            for (int k = 0; k < total; ++k) rhs.coeff[k] -= bh.coeff[k];
        }
        SpectralField um;
        um.grid = p.grid;
        um.coeff.resize(total);
        for (int k = 0; k < total; ++k)
            um.coeff[k] = rhs.coeff[k] / (w[m] + p.sigma * lam[k]);
        uh[m] = um;
        out.snapshots[m] = inverse_transform(um);
        if (out.snapshots[m].max_abs() > guard)
            throw stability_error("solve_heat_l1: blowup guard tripped at node " +
                                  std::to_string(m));
    }
    return out;
}

SpaceTimeField solve_heat_classical(const LinearProblem& p) {
    p.validate();
    if (!p.tgrid.is_uniform())
        throw config_error("solve_heat_classical: uniform time grid required");
    const int M = p.tgrid.steps;
    const double dt = p.tgrid.dt();
    const auto lam = laplacian_symbol(p.grid);
    const int total = p.grid.size();

    SpaceTimeField out;
    out.tgrid = p.tgrid;
    out.snapshots.assign(M + 1, Field::zeros(p.grid));
    out.snapshots[0] = p.u0;

    SpectralField u = transform(p.u0);
    for (int m = 1; m <= M; ++m) {
        SpectralField rhs = u;
        for (auto& c : rhs.coeff) c /= dt;
        if (p.source) {
            const SpectralField fm = transform(p.source->snapshots[m]);
            for (int k = 0; k < total; ++k) rhs.coeff[k] += fm.coeff[k];
        }
        if (p.drift) {
            const SpectralField bh = transform(drift_term(p, out.snapshots[m - 1], m - 1));
            for (int k = 0; k < total; ++k) rhs.coeff[k] -= bh.coeff[k];
        }
        for (int k = 0; k < total; ++k)
            u.coeff[k] = rhs.coeff[k] / (1.0 / dt + p.sigma * lam[k]);
        out.snapshots[m] = inverse_transform(u);
    }
    return out;
}

double max_principle_gap(const SpaceTimeField& u, const LinearProblem& p) {
    const double bound =
        p.u0.max_abs() + std::pow(p.tgrid.t_final, p.tgrid.beta) /
                             gamma_fn(1.0 + p.tgrid.beta) * source_max_abs(p);
    return u.max_abs() - bound;
}

}  // namespace fracthj
