#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracthj/errors.hpp"
#include "fracthj/linear_solver.hpp"
#include "fracthj/special.hpp"

#include <cmath>
#include <random>

using namespace fracthj;

namespace {

Field cos_mode(const TorusGrid& g, int k, double amp) {
    Field f = Field::zeros(g);
    for (int i = 0; i < g.size(); ++i) {
        double x[2];
        g.coords(i, x);
        f.values[i] = amp * std::cos(2.0 * M_PI * k * x[0]);
    }
    return f;
}

SpaceTimeField constant_source(const TorusGrid& g, const TimeGrid& tg, double c) {
    SpaceTimeField s;
    s.tgrid = tg;
    s.snapshots.assign(tg.nodes.size(), Field::constant(g, c));
    return s;
}

double field_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

double st_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.snapshots.size(); ++i)
        m = std::max(m, field_diff(a.snapshots[i], b.snapshots[i]));
    return m;
}

}  // namespace

TEST_CASE("mild solver: single mode follows the Mittag-Leffler profile") {
    const double beta = 0.7, sigma = 1.0;
    TorusGrid g{1, 32};
    LinearProblem p;
    p.grid = g;
    p.tgrid = TimeGrid::uniform(0.5, 40, beta);
    p.sigma = sigma;
    p.u0 = cos_mode(g, 1, 1.0);
    const SpaceTimeField u = solve_heat_mild(p);

    const double lam = sigma * 4.0 * M_PI * M_PI;
    MlFamily fam(beta, 1.0);
    for (int m = 0; m <= 40; ++m) {
        const double t = p.tgrid.nodes[m];
        const double amp = fam(-lam * std::pow(t, beta));
        const Field ref = cos_mode(g, 1, amp);
        CHECK(field_diff(u.snapshots[m], ref) < 1e-8);
    }
}

TEST_CASE("mild solver: unit source with zero data gives t^beta/Gamma(1+beta)") {
    const double beta = 0.5;
    TorusGrid g{1, 16};
    LinearProblem p;
    p.grid = g;
    p.tgrid = TimeGrid::uniform(1.0, 32, beta);
    p.u0 = Field::zeros(g);
    p.source = constant_source(g, p.tgrid, 1.0);
    const SpaceTimeField u = solve_heat_mild(p);
    for (int m = 0; m <= 32; ++m) {
        const double t = p.tgrid.nodes[m];
        const double ref = std::pow(t, beta) / gamma_fn(1.0 + beta);
        for (double v : u.snapshots[m].values)
            CHECK(std::abs(v - ref) < 1e-10);
    }
}

TEST_CASE("L1 solver: unit source with zero data approximates t^beta/Gamma(1+beta)") {
    const double beta = 0.5;
    TorusGrid g{1, 16};
    auto layer_error = [&](int M) {
        LinearProblem p;
        p.grid = g;
        p.tgrid = TimeGrid::uniform(1.0, M, beta);
        p.u0 = Field::zeros(g);
        p.source = constant_source(g, p.tgrid, 1.0);
        const SpaceTimeField u = solve_heat_l1(p);
        // the scheme resolves the t^beta layer only away from t = 0
        double e = 0.0;
        for (int m = M / 4; m <= M; ++m) {
            const double t = p.tgrid.nodes[m];
            const double ref = std::pow(t, beta) / gamma_fn(1.0 + beta);
            for (double v : u.snapshots[m].values)
                e = std::max(e, std::abs(v - ref));
        }
        return e;
    };
    const double e64 = layer_error(64);
    CHECK(e64 < 2e-2);
    CHECK(layer_error(256) < e64);
}

TEST_CASE("both solvers preserve the spatial mean without source") {
    TorusGrid g{1, 32};
    Field u0 = cos_mode(g, 2, 0.7);
    for (double& v : u0.values) v += 0.3;  // nonzero mean
    LinearProblem p;
    p.grid = g;
    p.tgrid = TimeGrid::uniform(0.4, 24, 0.6);
    p.u0 = u0;
    for (const SpaceTimeField& u : {solve_heat_mild(p), solve_heat_l1(p)})
        for (const auto& f : u.snapshots)
            CHECK(std::abs(f.mean() - u0.mean()) < 1e-13);
}

TEST_CASE("single-mode amplitude decays monotonically in time") {
    TorusGrid g{1, 32};
    LinearProblem p;
    p.grid = g;
    p.tgrid = TimeGrid::uniform(1.0, 32, 0.4);
    p.u0 = cos_mode(g, 1, 1.0);
    for (const SpaceTimeField& u : {solve_heat_mild(p), solve_heat_l1(p)}) {
        double prev = 2.0;
        for (const auto& f : u.snapshots) {
            const double amp = f.max_abs();
            CHECK(amp <= prev + 1e-14);
            CHECK(amp >= 0.0);
            prev = amp;
        }
    }
}

TEST_CASE("mild and L1 agree and the distance shrinks with the step") {
    const double beta = 0.7;
    TorusGrid g{1, 32};
    // homogeneous two-mode data; the graded mesh resolves the t^beta layer
    // that otherwise dominates the L1 error near t = 0
    auto solve_pair = [&](int M) {
        LinearProblem p;
        p.grid = g;
        p.tgrid = TimeGrid::graded(0.5, M, beta, 3.0);
        p.u0 = cos_mode(g, 1, 1.0);
        const Field second = cos_mode(g, 2, 0.5);
        for (int i = 0; i < g.size(); ++i) p.u0.values[i] += second.values[i];
        return st_diff(solve_heat_mild(p), solve_heat_l1(p));
    };
    const double e64 = solve_pair(64);
    const double e128 = solve_pair(128);
    CHECK(e64 < 5e-2);
    CHECK(e128 < e64);
}

TEST_CASE("classical stepper approaches exp decay as the step shrinks") {
    TorusGrid g{1, 16};
    const double sigma = 0.5, lam = sigma * 4.0 * M_PI * M_PI;
    auto err = [&](int M) {
        LinearProblem p;
        p.grid = g;
        p.tgrid = TimeGrid::uniform(0.25, M, 0.5);  // beta ignored
        p.sigma = sigma;
        p.u0 = cos_mode(g, 1, 1.0);
        const SpaceTimeField u = solve_heat_classical(p);
        double e = 0.0;
        for (int m = 0; m <= M; ++m) {
            const Field ref = cos_mode(g, 1, std::exp(-lam * p.tgrid.nodes[m]));
            e = std::max(e, field_diff(u.snapshots[m], ref));
        }
        return e;
    };
    const double e32 = err(32), e64 = err(64);
    CHECK(e32 < 0.2);
    CHECK(e64 < 0.6 * e32);  // first order in the step
}

TEST_CASE("sup-norm bound holds on seeded random problems with drift") {
    std::mt19937 rng(7777);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double beta = 0.4 + 0.2 * (trial % 3);
        TorusGrid g{1, 32};
        LinearProblem p;
        p.grid = g;
        p.tgrid = TimeGrid::uniform(0.5, 64, beta);
        p.u0 = Field::zeros(g);
        for (int k = 1; k <= 3; ++k) {
            const Field c = cos_mode(g, k, uc(rng));
            for (int i = 0; i < g.size(); ++i) p.u0.values[i] += c.values[i];
        }
        SpaceTimeField src;
        src.tgrid = p.tgrid;
        const double amp = uc(rng);
        for (double t : p.tgrid.nodes)
            src.snapshots.push_back(cos_mode(g, 1, amp * (1.0 + t)));
        p.source = src;
        SpaceTimeField b;
        b.tgrid = p.tgrid;
        b.snapshots.assign(p.tgrid.nodes.size(), cos_mode(g, 1, uc(rng)));
        p.drift = std::vector<SpaceTimeField>{b};
        const SpaceTimeField u = solve_heat_l1(p);
        CHECK(max_principle_gap(u, p) <= 1e-3);
    }
}

TEST_CASE("graded L1 solve matches the uniform one at the final time") {
    const double beta = 0.5;
    TorusGrid g{1, 16};
    LinearProblem pu, pg;
    pu.grid = pg.grid = g;
    pu.tgrid = TimeGrid::uniform(0.5, 128, beta);
    pg.tgrid = TimeGrid::graded(0.5, 128, beta, 3.0);
    pu.u0 = pg.u0 = cos_mode(g, 1, 1.0);
    const SpaceTimeField uu = solve_heat_l1(pu);
    const SpaceTimeField ug = solve_heat_l1(pg);
    CHECK(field_diff(uu.snapshots.back(), ug.snapshots.back()) < 1e-3);
}

TEST_CASE("mild solver input restrictions") {
    TorusGrid g{1, 16};
    LinearProblem p;
    p.grid = g;
    p.tgrid = TimeGrid::uniform(1.0, 8, 0.5);
    p.u0 = Field::zeros(g);
    SpaceTimeField b;
    b.tgrid = p.tgrid;
    b.snapshots.assign(9, Field::zeros(g));
    p.drift = std::vector<SpaceTimeField>{b};
    CHECK_THROWS_AS(solve_heat_mild(p), config_error);

    LinearProblem q;
    q.grid = g;
    q.tgrid = TimeGrid::graded(1.0, 8, 0.5, 2.0);
    q.u0 = Field::zeros(g);
    q.source = constant_source(g, q.tgrid, 1.0);
    CHECK_THROWS_AS(solve_heat_mild(q), config_error);
}

TEST_CASE("problem validation rejects inconsistent inputs") {
    TorusGrid g{1, 16};
    LinearProblem p;
    p.grid = g;
    p.tgrid = TimeGrid::uniform(1.0, 8, 0.5);
    p.u0 = Field::zeros(TorusGrid{1, 32});  // wrong grid
    CHECK_THROWS_AS(p.validate(), config_error);
    p.u0 = Field::zeros(g);
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);
}
