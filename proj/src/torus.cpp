#include "fracthj/torus.hpp"
#include "fracthj/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <tuple>

namespace fracthj {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct PlanEntry {
    std::vector<std::complex<double>> buf;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    PlanEntry(int dim, int n) {
        const int total = dim == 1 ? n : n * n;
        buf.resize(total);
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        if (dim == 1) {
            fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
    }
    ~PlanEntry() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
    PlanEntry(const PlanEntry&) = delete;
    PlanEntry& operator=(const PlanEntry&) = delete;
};

PlanEntry& plan_for(int dim, int n) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<PlanEntry>> cache;
    auto& slot = cache[{dim, n}];
    if (!slot) slot = std::make_unique<PlanEntry>(dim, n);
    return *slot;
}

bool has_nyquist(const TorusGrid& g, int flat) {
    if (g.dim == 1) return flat == g.n / 2;
    const int j1 = flat / g.n, j2 = flat % g.n;
    return j1 == g.n / 2 || j2 == g.n / 2;
}

}  // namespace

void TorusGrid::validate() const {
    if (dim != 1 && dim != 2) throw config_error("TorusGrid: dim must be 1 or 2");
    if (n < 8 || n % 2 != 0) throw config_error("TorusGrid: n must be even and >= 8");
}

void TorusGrid::coords(int flat, double* x) const {
    if (dim == 1) {
        x[0] = static_cast<double>(flat) / n;
    } else {
        x[0] = static_cast<double>(flat / n) / n;
        x[1] = static_cast<double>(flat % n) / n;
    }
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Field::mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

SpectralField transform(const Field& f) {
    f.grid.validate();
    if (static_cast<int>(f.values.size()) != f.grid.size())
        throw config_error("transform: field size mismatch");
    auto& plan = plan_for(f.grid.dim, f.grid.n);
    const int total = f.grid.size();
    for (int i = 0; i < total; ++i) plan.buf[i] = f.values[i];
    fftw_execute(plan.fwd);
    SpectralField out;
    out.grid = f.grid;
    out.coeff.resize(total);
    const double scale = 1.0 / total;
    for (int i = 0; i < total; ++i) out.coeff[i] = plan.buf[i] * scale;
    return out;
}

Field inverse_transform(const SpectralField& F) {
    F.grid.validate();
    if (static_cast<int>(F.coeff.size()) != F.grid.size())
        throw config_error("inverse_transform: coefficient size mismatch");
    auto& plan = plan_for(F.grid.dim, F.grid.n);
    const int total = F.grid.size();
    std::copy(F.coeff.begin(), F.coeff.end(), plan.buf.begin());
    fftw_execute(plan.bwd);
    Field out = Field::zeros(F.grid);
    for (int i = 0; i < total; ++i) out.values[i] = plan.buf[i].real();
    return out;
}

std::vector<double> laplacian_symbol(const TorusGrid& g) {
    std::vector<double> lam(g.size(), 0.0);
    const double c = 4.0 * kPi * kPi;
    for (int i = 0; i < g.size(); ++i) {
        if (has_nyquist(g, i)) continue;  // projected out, matching div(grad)
        if (g.dim == 1) {
            const int k = fft_wavenumber(i, g.n);
            lam[i] = c * k * k;
        } else {
            const int k1 = fft_wavenumber(i / g.n, g.n);
            const int k2 = fft_wavenumber(i % g.n, g.n);
            lam[i] = c * (k1 * k1 + k2 * k2);
        }
    }
    return lam;
}

Field laplacian_apply(const Field& f, double sigma) {
    SpectralField F = transform(f);
    const auto lam = laplacian_symbol(f.grid);
    for (size_t i = 0; i < F.coeff.size(); ++i) F.coeff[i] *= -sigma * lam[i];
    return inverse_transform(F);
}

std::vector<Field> gradient(const Field& f) {
    SpectralField F = transform(f);
    std::vector<Field> out;
    for (int d = 0; d < f.grid.dim; ++d) {
        SpectralField G = F;
        for (int i = 0; i < f.grid.size(); ++i) {
            int k;
            if (f.grid.dim == 1)
                k = fft_wavenumber(i, f.grid.n);
            else
                k = d == 0 ? fft_wavenumber(i / f.grid.n, f.grid.n)
                           : fft_wavenumber(i % f.grid.n, f.grid.n);
            if (std::abs(k) == f.grid.n / 2 || has_nyquist(f.grid, i))
                G.coeff[i] = 0.0;
            else
                G.coeff[i] *= std::complex<double>(0.0, 2.0 * kPi * k);
        }
        out.push_back(inverse_transform(G));
    }
    return out;
}

Field divergence(std::span<const Field> v) {
    if (v.empty()) throw config_error("divergence: empty vector field");
    const TorusGrid g = v[0].grid;
    if (static_cast<int>(v.size()) != g.dim)
        throw config_error("divergence: component count must equal dim");
    SpectralField acc;
    acc.grid = g;
    acc.coeff.assign(g.size(), 0.0);
    for (int d = 0; d < g.dim; ++d) {
        SpectralField F = transform(v[d]);
        for (int i = 0; i < g.size(); ++i) {
            int k;
            if (g.dim == 1)
                k = fft_wavenumber(i, g.n);
            else
                k = d == 0 ? fft_wavenumber(i / g.n, g.n) : fft_wavenumber(i % g.n, g.n);
            if (std::abs(k) == g.n / 2 || has_nyquist(g, i)) continue;
            acc.coeff[i] += F.coeff[i] * std::complex<double>(0.0, 2.0 * kPi * k);
        }
    }
    return inverse_transform(acc);
}

double bessel_norm(const Field& f, double mu) {
    SpectralField F = transform(f);
    const double c = 4.0 * kPi * kPi;
    double s = 0.0;
    for (int i = 0; i < f.grid.size(); ++i) {
        double k2;
        if (f.grid.dim == 1) {
            const int k = fft_wavenumber(i, f.grid.n);
            k2 = static_cast<double>(k) * k;
        } else {
            const int k1 = fft_wavenumber(i / f.grid.n, f.grid.n);
            const int k2i = fft_wavenumber(i % f.grid.n, f.grid.n);
            k2 = static_cast<double>(k1) * k1 + static_cast<double>(k2i) * k2i;
        }
        s += std::pow(1.0 + c * k2, mu) * std::norm(F.coeff[i]);
    }
    return std::sqrt(s);
}

double holder_seminorm_grid(const Field& f, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw config_error("holder_seminorm_grid: alpha in (0,1]");
    const TorusGrid g = f.grid;
    const int total = g.size();
    auto geodesic = [&](int a, int b) {
        double xa[2], xb[2], d2 = 0.0;
        g.coords(a, xa);
        g.coords(b, xb);
        for (int d = 0; d < g.dim; ++d) {
            double dd = std::abs(xa[d] - xb[d]);
            dd = std::min(dd, 1.0 - dd);
            d2 += dd * dd;
        }
        return std::sqrt(d2);
    };
    auto ratio = [&](int a, int b) {
        const double dist = geodesic(a, b);
        if (dist == 0.0) return 0.0;
        return std::abs(f.values[a] - f.values[b]) / std::pow(dist, alpha);
    };
    double best = 0.0;
    // adjacent pairs (usually attain the alpha = 1 maximum)
    for (int i = 0; i < total; ++i) {
        if (g.dim == 1) {
            best = std::max(best, ratio(i, (i + 1) % g.n));
        } else {
            const int r = i / g.n, c = i % g.n;
            best = std::max(best, ratio(i, r * g.n + (c + 1) % g.n));
            best = std::max(best, ratio(i, ((r + 1) % g.n) * g.n + c));
        }
    }
    const long long all_pairs = static_cast<long long>(total) * (total - 1) / 2;
    const long long budget = 2'000'000;
    if (all_pairs <= budget) {
        for (int i = 0; i < total; ++i)
            for (int j = i + 1; j < total; ++j) best = std::max(best, ratio(i, j));
    } else {
        std::mt19937 rng(12345);
        std::uniform_int_distribution<int> pick(0, total - 1);
        for (long long s = 0; s < budget; ++s) {
            const int i = pick(rng), j = pick(rng);
            if (i != j) best = std::max(best, ratio(i, j));
        }
    }
    return best;
}

Field dealiased_map(std::span<const Field> inputs,
                    const std::function<double(std::span<const double>)>& op) {
    if (inputs.empty()) throw config_error("dealiased_map: no inputs");
    const TorusGrid g = inputs[0].grid;
    for (const auto& f : inputs)
        if (!(f.grid == g)) throw config_error("dealiased_map: grid mismatch");
    TorusGrid big = g;
    big.n = ((3 * g.n / 2) + 1) / 2 * 2;  // 3/2 rule, rounded to even

    auto pad = [&](const Field& f) {
        SpectralField F = transform(f);
        SpectralField P;
        P.grid = big;
        P.coeff.assign(big.size(), 0.0);
        const int half = g.n / 2;
        if (g.dim == 1) {
            for (int k = -half + 1; k < half; ++k)
                P.coeff[(k + big.n) % big.n] = F.coeff[(k + g.n) % g.n];
        } else {
            for (int k1 = -half + 1; k1 < half; ++k1)
                for (int k2 = -half + 1; k2 < half; ++k2)
                    P.coeff[((k1 + big.n) % big.n) * big.n + (k2 + big.n) % big.n] =
                        F.coeff[((k1 + g.n) % g.n) * g.n + (k2 + g.n) % g.n];
        }
        return inverse_transform(P);
    };

    std::vector<Field> fine;
    fine.reserve(inputs.size());
    for (const auto& f : inputs) fine.push_back(pad(f));

    Field result_fine = Field::zeros(big);
    std::vector<double> args(inputs.size());
    for (int i = 0; i < big.size(); ++i) {
        for (size_t a = 0; a < fine.size(); ++a) args[a] = fine[a].values[i];
        result_fine.values[i] = op(args);
    }

    // truncate back to |k| < n/2
    SpectralField R = transform(result_fine);
    SpectralField T;
    T.grid = g;
    T.coeff.assign(g.size(), 0.0);
    const int half = g.n / 2;
    if (g.dim == 1) {
        for (int k = -half + 1; k < half; ++k)
            T.coeff[(k + g.n) % g.n] = R.coeff[(k + big.n) % big.n];
    } else {
        for (int k1 = -half + 1; k1 < half; ++k1)
            for (int k2 = -half + 1; k2 < half; ++k2)
                T.coeff[((k1 + g.n) % g.n) * g.n + (k2 + g.n) % g.n] =
                    R.coeff[((k1 + big.n) % big.n) * big.n + (k2 + big.n) % big.n];
    }
    return inverse_transform(T);
}

Field dealiased_product(const Field& a, const Field& b) {
    const Field* fs[2] = {&a, &b};
    Field inputs[2] = {a, b};
    (void)fs;
    return dealiased_map(std::span<const Field>(inputs, 2),
                         [](std::span<const double> v) { return v[0] * v[1]; });
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw config_error("lp_norm: p >= 1");
    double s = 0.0;
    for (double v : f.values) s += std::pow(std::abs(v), p);
    return std::pow(s / static_cast<double>(f.values.size()), 1.0 / p);
}

}  // namespace fracthj
