#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracthj/errors.hpp"
#include "fracthj/torus.hpp"

#include <cmath>
#include <random>

using namespace fracthj;

namespace {

constexpr double kTau = 2.0 * M_PI;

Field sample1d(const TorusGrid& g, double (*f)(double)) {
    Field out = Field::zeros(g);
    for (int i = 0; i < g.size(); ++i) {
        double x[2];
        g.coords(i, x);
        out.values[i] = f(x[0]);
    }
    return out;
}

Field random_field(const TorusGrid& g, unsigned seed) {
    Field out = Field::zeros(g);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (auto& v : out.values) v = unif(rng);
    return out;
}

Field shift_by_one(const Field& f, int dir) {
    const TorusGrid g = f.grid;
    Field out = Field::zeros(g);
    for (int i = 0; i < g.size(); ++i) {
        if (g.dim == 1) {
            out.values[(i + 1) % g.n] = f.values[i];
        } else {
            int r = i / g.n, c = i % g.n;
            if (dir == 0)
                r = (r + 1) % g.n;
            else
                c = (c + 1) % g.n;
            out.values[r * g.n + c] = f.values[i];
        }
    }
    return out;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS((TorusGrid{1, 7}.validate()), config_error);
    CHECK_THROWS_AS((TorusGrid{1, 4}.validate()), config_error);
    CHECK_THROWS_AS((TorusGrid{3, 16}.validate()), config_error);
    CHECK_NOTHROW((TorusGrid{2, 16}.validate()));
}

TEST_CASE("transform: constants and single modes") {
    const TorusGrid g{1, 16};
    const SpectralField C = transform(Field::constant(g, 2.5));
    CHECK(std::abs(C.coeff[0] - 2.5) <= 1e-14);
    for (int i = 1; i < g.n; ++i) CHECK(std::abs(C.coeff[i]) <= 1e-14);

    const SpectralField F =
        transform(sample1d(g, [](double x) { return std::cos(kTau * x); }));
    CHECK(std::abs(F.coeff[1] - 0.5) <= 1e-14);
    CHECK(std::abs(F.coeff[g.n - 1] - 0.5) <= 1e-14);
    for (int i = 0; i < g.n; ++i)
        if (i != 1 && i != g.n - 1) CHECK(std::abs(F.coeff[i]) <= 1e-13);
}

TEST_CASE("transform round trip and Parseval, d = 1 and d = 2") {
    for (int dim : {1, 2}) {
        const TorusGrid g{dim, 24};
        const Field f = random_field(g, 42 + dim);
        const Field back = inverse_transform(transform(f));
        CHECK(max_diff(f, back) <= 1e-13 * f.max_abs());

        double l2 = 0.0;
        for (double v : f.values) l2 += v * v;
        l2 = std::sqrt(l2 / g.size());
        CHECK(bessel_norm(f, 0.0) == doctest::Approx(l2).epsilon(1e-12));
    }
}

TEST_CASE("laplacian eigenfunctions") {
    const TorusGrid g{1, 32};
    const Field f = sample1d(g, [](double x) { return std::cos(kTau * x); });
    const Field lap = laplacian_apply(f, 1.0);
    for (int i = 0; i < g.size(); ++i)
        CHECK(lap.values[i] ==
              doctest::Approx(-4.0 * M_PI * M_PI * f.values[i]).epsilon(1e-11));

    CHECK(laplacian_apply(Field::constant(g, 3.0), 2.0).max_abs() <= 1e-13);

    const TorusGrid g2{2, 32};
    Field h = Field::zeros(g2);
    Field want = Field::zeros(g2);
    for (int i = 0; i < g2.size(); ++i) {
        double x[2];
        g2.coords(i, x);
        h.values[i] = std::sin(kTau * x[0]) + std::cos(2.0 * kTau * x[1]);
        want.values[i] = -4.0 * M_PI * M_PI * std::sin(kTau * x[0]) -
                         16.0 * M_PI * M_PI * std::cos(2.0 * kTau * x[1]);
    }
    CHECK(max_diff(laplacian_apply(h, 1.0), want) <= 1e-10);
}

TEST_CASE("gradient and divergence") {
    const TorusGrid g{1, 32};
    const Field f = sample1d(g, [](double x) { return std::cos(kTau * x); });
    const auto grad = gradient(f);
    REQUIRE(grad.size() == 1);
    for (int i = 0; i < g.size(); ++i) {
        double x[2];
        g.coords(i, x);
        CHECK(grad[0].values[i] ==
              doctest::Approx(-kTau * std::sin(kTau * x[0])).epsilon(1e-11));
    }

    const TorusGrid g2{2, 16};
    std::vector<Field> cv = {Field::constant(g2, 1.0), Field::constant(g2, -2.0)};
    CHECK(divergence(cv).max_abs() <= 1e-13);
}

TEST_CASE("div(grad f) equals the spectral laplacian") {
    for (int dim : {1, 2}) {
        const TorusGrid g{dim, 16};
        const Field f = random_field(g, 5 + dim);
        const auto grad = gradient(f);
        const Field dg = divergence(grad);
        const Field lap = laplacian_apply(f, 1.0);
        CHECK(max_diff(dg, lap) <= 1e-11);
    }
}

TEST_CASE("bessel norm: single mode and monotonicity in mu") {
    const TorusGrid g{1, 32};
    const Field f = sample1d(g, [](double x) { return std::cos(kTau * x); });
    const double want = (1.0 + 4.0 * M_PI * M_PI) / std::sqrt(2.0);
    CHECK(bessel_norm(f, 2.0) == doctest::Approx(want).epsilon(1e-12));

    const Field r = random_field(g, 77);
    double prev = bessel_norm(r, -1.0);
    for (double mu : {0.0, 0.5, 1.0, 2.0}) {
        const double cur = bessel_norm(r, mu);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("holder seminorm diagnostics") {
    const TorusGrid g{1, 64};
    CHECK(holder_seminorm_grid(Field::constant(g, 4.0), 0.5) == 0.0);
    const Field f = sample1d(g, [](double x) { return std::cos(kTau * x); });
    const double s = holder_seminorm_grid(f, 1.0);
    CHECK(s <= kTau + 1e-9);  // Lipschitz constant of cos(2 pi x)
    CHECK(s >= 4.0);          // mean-value lower bound across antipodes
}

TEST_CASE("shift equivariance of the differential operators") {
    for (int dim : {1, 2}) {
        const TorusGrid g{dim, 16};
        const Field f = random_field(g, 100 + dim);
        for (int dir = 0; dir < dim; ++dir) {
            const Field a = shift_by_one(laplacian_apply(f, 1.3), dir);
            const Field b = laplacian_apply(shift_by_one(f, dir), 1.3);
            CHECK(max_diff(a, b) <= 1e-10);
            const Field ga = shift_by_one(gradient(f)[dir], dir);
            const Field gb = gradient(shift_by_one(f, dir))[dir];
            CHECK(max_diff(ga, gb) <= 1e-10);
        }
    }
}

TEST_CASE("dealiased product: two-mode aliasing residual") {
    // cos(2 pi k1 x) cos(2 pi k2 x) with k1 + k2 beyond n/2 aliases in a plain
    // pointwise product; the padded product must keep only the true low mode.
    const TorusGrid g{1, 16};
    Field a = sample1d(g, [](double x) { return std::cos(kTau * 5.0 * x); });
    Field b = sample1d(g, [](double x) { return std::cos(kTau * 6.0 * x); });
    const Field p = dealiased_product(a, b);
    // true product = 0.5 cos(2 pi 11 x) + 0.5 cos(2 pi x); on n = 16 only the
    // k = 1 part is representable after dealiasing
    const SpectralField P = transform(p);
    CHECK(std::abs(P.coeff[1] - 0.25) <= 1e-12);
    CHECK(std::abs(P.coeff[g.n - 1] - 0.25) <= 1e-12);
    for (int i = 0; i < g.n; ++i)
        if (i != 1 && i != g.n - 1) CHECK(std::abs(P.coeff[i]) <= 1e-12);
}

TEST_CASE("dealiased product matches the exact product on resolvable modes") {
    const TorusGrid g{1, 32};
    const Field a = sample1d(g, [](double x) { return 1.0 + 0.5 * std::cos(kTau * x); });
    const Field b = sample1d(g, [](double x) { return std::sin(kTau * 2.0 * x); });
    Field want = Field::zeros(g);
    for (int i = 0; i < g.size(); ++i) want.values[i] = a.values[i] * b.values[i];
    CHECK(max_diff(dealiased_product(a, b), want) <= 1e-12);
}

TEST_CASE("lp norms") {
    const TorusGrid g{1, 64};
    const Field f = sample1d(g, [](double x) { return std::cos(kTau * x); });
    CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(lp_norm(Field::constant(g, -3.0), 7.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(lp_norm(f, 0.5), config_error);
}
