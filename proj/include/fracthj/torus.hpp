#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace fracthj {

/// Uniform periodic mesh on the unit torus, d in {1,2}, n even points per
/// dimension.
struct TorusGrid {
    int dim = 1;
    int n = 8;

    double spacing() const { return 1.0 / n; }
    int size() const { return dim == 1 ? n : n * n; }
    void validate() const;
    bool operator==(const TorusGrid&) const = default;

    /// Physical coordinates of the flat index (row-major for d=2).
    void coords(int flat, double* x) const;
};

/// Real samples over the grid points.
struct Field {
    TorusGrid grid;
    std::vector<double> values;

    static Field zeros(TorusGrid g) { return {g, std::vector<double>(g.size(), 0.0)}; }
    static Field constant(TorusGrid g, double c) {
        return {g, std::vector<double>(g.size(), c)};
    }
    double max_abs() const;
    double mean() const;
};

/// Fourier coefficients u_hat(k), |k_i| <= n/2, stored in FFT layout
/// (index j maps to wavenumber j or j-n). Hermitian by construction for
/// transforms of real fields.
struct SpectralField {
    TorusGrid grid;
    std::vector<std::complex<double>> coeff;
};

SpectralField transform(const Field& f);
Field inverse_transform(const SpectralField& F);

/// Wavenumber (integer) of FFT index j on an n-point grid.
inline int fft_wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

/// -sigma * Laplacian, spectral symbol sigma * 4 pi^2 |k|^2 with sign flip.
Field laplacian_apply(const Field& f, double sigma);

/// Spectral symbol of -Laplacian: lambda_k = 4 pi^2 |k|^2 per flat mode index.
std::vector<double> laplacian_symbol(const TorusGrid& g);

std::vector<Field> gradient(const Field& f);
Field divergence(std::span<const Field> v);

/// Bessel-potential norm sqrt(sum (1 + 4 pi^2 |k|^2)^mu |u_hat|^2), p = 2.
double bessel_norm(const Field& f, double mu);

/// Grid Hoelder seminorm: max over sampled point pairs of
/// |f(x)-f(y)| / dist(x,y)^alpha with geodesic torus distance. All adjacent
/// pairs are always included; long-range pairs are sampled up to a budget.
double holder_seminorm_grid(const Field& f, double alpha);

/// Pointwise nonlinearity evaluated on a 3/2 zero-padded grid and projected
/// back (dealiased). op receives one value per input field at each point.
Field dealiased_map(std::span<const Field> inputs,
                    const std::function<double(std::span<const double>)>& op);

Field dealiased_product(const Field& a, const Field& b);

/// L^p norm over the torus (uniform quadrature, unit volume).
double lp_norm(const Field& f, double p);

}  // namespace fracthj
