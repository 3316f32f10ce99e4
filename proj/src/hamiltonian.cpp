#include "fracthj/hamiltonian.hpp"

#include "fracthj/errors.hpp"

#include <cmath>
#include <random>

namespace fracthj {

namespace {

double norm2(std::array<double, 2> p) { return p[0] * p[0] + p[1] * p[1]; }

}  // namespace

double Hamiltonian::operator()(int flat, std::array<double, 2> p) const {
    switch (kind) {
        case Kind::quadratic:
            return coefficient.values[flat] * norm2(p);
        case Kind::power:
            return coefficient.values[flat] *
                   (std::pow(1.0 + norm2(p), 0.5 * gamma) - 1.0);
        case Kind::custom:
            return custom_h(flat, p);
    }
    return 0.0;
}

std::array<double, 2> Hamiltonian::grad_p(int flat, std::array<double, 2> p) const {
    switch (kind) {
        case Kind::quadratic: {
            const double c = 2.0 * coefficient.values[flat];
            return {c * p[0], c * p[1]};
        }
        case Kind::power: {
            const double c = coefficient.values[flat] * gamma *
                             std::pow(1.0 + norm2(p), 0.5 * gamma - 1.0);
            return {c * p[0], c * p[1]};
        }
        case Kind::custom:
            return custom_grad(flat, p);
    }
    return {0.0, 0.0};
}

Hamiltonian make_hamiltonian(Hamiltonian::Kind kind, double gamma,
                             const Field& coefficient) {
    if (!(gamma > 1.0)) throw config_error("make_hamiltonian: gamma must exceed 1");
    Hamiltonian H;
    H.kind = kind;
    H.gamma = kind == Hamiltonian::Kind::quadratic ? 2.0 : gamma;
    H.coefficient = coefficient;
    if (kind != Hamiltonian::Kind::custom) {
        for (double h : coefficient.values)
            if (!(h > 0.0))
                throw config_error("make_hamiltonian: coefficient must be strictly positive");
    }

    // gradient consistency against centered differences
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> up(-3.0, 3.0);
    std::uniform_int_distribution<int> ux(0, coefficient.grid.size() - 1);
    const double eps = 1e-6;
    for (int s = 0; s < 32; ++s) {
        const int flat = ux(rng);
        const std::array<double, 2> p = {up(rng),
                                         coefficient.grid.dim == 2 ? up(rng) : 0.0};
        const auto g = H.grad_p(flat, p);
        for (int d = 0; d < coefficient.grid.dim; ++d) {
            std::array<double, 2> pp = p, pm = p;
            pp[d] += eps;
            pm[d] -= eps;
            const double fd = (H(flat, pp) - H(flat, pm)) / (2.0 * eps);
            const double scale = std::max(1.0, std::abs(g[d]));
            if (std::abs(fd - g[d]) > 1e-6 * scale)
                throw config_error("make_hamiltonian: gradient inconsistent with H");
        }
    }
    return H;
}

bool AssumptionReport::all_hold() const {
    const double tol = -1e-9;
    return coercivity_margin >= tol && growth_margin >= tol &&
           grad_growth_margin >= tol && nonneg_margin >= tol &&
           x_lipschitz_margin >= tol;
}

AssumptionReport check_structural_assumptions(const Hamiltonian& H,
                                              const TorusGrid& grid,
                                              int sample_count) {
    if (sample_count < 100)
        throw config_error("check_structural_assumptions: need >= 100 samples");
    AssumptionReport r;
    r.gamma = H.gamma;

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> urad(0.0, 10.0);
    std::uniform_int_distribution<int> ux(0, grid.size() - 1);

    double coercivity_C = std::numeric_limits<double>::infinity();
    double growth_C = 0.0, grad_C = 0.0, nonneg_min = 0.0;
    std::vector<std::tuple<int, std::array<double, 2>, double>> samples;
    samples.reserve(sample_count);
    for (int s = 0; s < sample_count; ++s) {
        const int flat = ux(rng);
        const double rad = urad(rng);
        std::array<double, 2> p;
        if (grid.dim == 2) {
            const double th = uang(rng);
            p = {rad * std::cos(th), rad * std::sin(th)};
        } else {
            p = {(s % 2 == 0 ? rad : -rad), 0.0};
        }
        const double pn = std::sqrt(norm2(p));
        const double h = H(flat, p);
        const auto g = H.grad_p(flat, p);
        const double excess = g[0] * p[0] + g[1] * p[1] - h;
        if (pn >= 1.0)
            coercivity_C = std::min(coercivity_C, excess / std::pow(pn, H.gamma));
        growth_C = std::max(growth_C, std::abs(h) / (std::pow(pn, H.gamma) + 1.0));
        grad_C = std::max(grad_C, std::hypot(g[0], g[1]) /
                                      (std::pow(pn, H.gamma - 1.0) + 1.0));
        nonneg_min = std::min(nonneg_min, h - H(flat, {0.0, 0.0}));
        samples.emplace_back(flat, p, pn);
    }

    if (!(coercivity_C > 1e-12) || !std::isfinite(coercivity_C)) {
        r.coercivity_C = 0.0;
        r.coercivity_c = 0.0;
        r.coercivity_margin = -1.0;  // no positive C works with c = 0
    } else {
        r.coercivity_C = coercivity_C;
        double c = 0.0;
        for (const auto& [flat, p, pn] : samples) {
            const auto g = H.grad_p(flat, p);
            const double excess = g[0] * p[0] + g[1] * p[1] - H(flat, p);
            c = std::max(c, coercivity_C * std::pow(pn, H.gamma) - excess);
        }
        r.coercivity_c = c;
        r.coercivity_margin = coercivity_C;
    }
    r.growth_C = growth_C;
    r.growth_margin = std::isfinite(growth_C) ? 0.0 : -1.0;
    r.grad_growth_C = grad_C;
    r.grad_growth_margin = std::isfinite(grad_C) ? 0.0 : -1.0;
    r.nonneg_margin = nonneg_min;

    // spatial regularity over adjacent grid pairs at sampled p
    double L = 0.0;
    const double hx = grid.spacing();
    for (int s = 0; s < sample_count; ++s) {
        const auto& [flat, p, pn] = samples[static_cast<size_t>(s)];
        int nb;
        if (grid.dim == 1) {
            nb = (flat + 1) % grid.n;
        } else {
            nb = (flat / grid.n) * grid.n + (flat % grid.n + 1) % grid.n;
        }
        const double d = std::abs(H(flat, p) - H(nb, p));
        L = std::max(L, d / (hx * (std::pow(pn, H.gamma) + 1.0)));
    }
    r.x_lipschitz = L;
    r.x_lipschitz_margin = std::isfinite(L) ? 0.0 : -1.0;
    return r;
}

Field hamiltonian_of_gradient(const Hamiltonian& H, const Field& u) {
    const auto grad = gradient(u);
    if (H.kind == Hamiltonian::Kind::custom) {
        Field out = Field::zeros(u.grid);
        for (int i = 0; i < u.grid.size(); ++i) {
            const std::array<double, 2> p = {
                grad[0].values[i], u.grid.dim == 2 ? grad[1].values[i] : 0.0};
            out.values[i] = H(i, p);
        }
        return out;
    }
    std::vector<Field> inputs;
    inputs.push_back(H.coefficient);
    for (const auto& g : grad) inputs.push_back(g);
    const double gamma = H.gamma;
    const bool quad = H.kind == Hamiltonian::Kind::quadratic;
    return dealiased_map(
        std::span<const Field>(inputs.data(), inputs.size()),
        [gamma, quad](std::span<const double> v) {
            double p2 = 0.0;
            for (size_t d = 1; d < v.size(); ++d) p2 += v[d] * v[d];
            if (quad) return v[0] * p2;
            return v[0] * (std::pow(1.0 + p2, 0.5 * gamma) - 1.0);
        });
}

std::vector<Field> hamiltonian_drift(const Hamiltonian& H, const Field& u) {
    const auto grad = gradient(u);
    std::vector<Field> out(u.grid.dim, Field::zeros(u.grid));
    for (int i = 0; i < u.grid.size(); ++i) {
        const std::array<double, 2> p = {grad[0].values[i],
                                         u.grid.dim == 2 ? grad[1].values[i] : 0.0};
        const auto g = H.grad_p(i, p);
        for (int d = 0; d < u.grid.dim; ++d) out[d].values[i] = g[d];
    }
    return out;
}

Field hamiltonian_excess(const Hamiltonian& H, const Field& u) {
    const auto grad = gradient(u);
    Field out = Field::zeros(u.grid);
    for (int i = 0; i < u.grid.size(); ++i) {
        const std::array<double, 2> p = {grad[0].values[i],
                                         u.grid.dim == 2 ? grad[1].values[i] : 0.0};
        const auto g = H.grad_p(i, p);
        out.values[i] = g[0] * p[0] + g[1] * p[1] - H(i, p);
    }
    return out;
}

}  // namespace fracthj
