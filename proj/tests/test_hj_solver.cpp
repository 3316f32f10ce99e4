#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracthj/hj_solver.hpp"
#include "fracthj/special.hpp"

#include <cmath>

using namespace fracthj;

namespace {

// Problem whose exact solution is u(t,x) = A t^beta cos(2 pi x): the forcing
// V is assembled from the closed-form time derivative, Laplacian and the
// Hamiltonian of the exact gradient.
HjProblem manufactured(double beta, double t_final, int steps, int n,
                       Hamiltonian::Kind kind, double gamma, double sigma,
                       double amplitude) {
    TorusGrid g{1, n};
    HjProblem p;
    p.grid = g;
    p.tgrid = TimeGrid::uniform(t_final, steps, beta);
    p.sigma = sigma;
    p.H = make_hamiltonian(kind, gamma, Field::constant(g, 1.0));
    p.u0 = Field::zeros(g);
    p.V.tgrid = p.tgrid;
    const double lam = 4.0 * M_PI * M_PI;
    for (double t : p.tgrid.nodes) {
        Field v = Field::zeros(g);
        const double tb = std::pow(t, beta);
        for (int i = 0; i < n; ++i) {
            double x[2];
            g.coords(i, x);
            const double c = std::cos(2.0 * M_PI * x[0]);
            const double du = -amplitude * 2.0 * M_PI * tb * std::sin(2.0 * M_PI * x[0]);
            v.values[i] = amplitude * gamma_fn(1.0 + beta) * c +
                          sigma * amplitude * lam * tb * c + p.H(i, {du, 0.0});
        }
        p.V.snapshots.push_back(v);
    }
    return p;
}

double manufactured_error(const SpaceTimeField& u, double beta, double amplitude) {
    const TorusGrid& g = u.snapshots.front().grid;
    double err = 0.0;
    for (size_t m = 0; m < u.snapshots.size(); ++m) {
        const double tb = std::pow(u.tgrid.nodes[m], beta);
        for (int i = 0; i < g.size(); ++i) {
            double x[2];
            g.coords(i, x);
            err = std::max(err, std::abs(u.snapshots[m].values[i] -
                                         amplitude * tb * std::cos(2.0 * M_PI * x[0])));
        }
    }
    return err;
}

SpaceTimeField exact_guess(const HjProblem& p, double amplitude) {
    SpaceTimeField z;
    z.tgrid = p.tgrid;
    for (double t : p.tgrid.nodes) {
        Field f = Field::zeros(p.grid);
        const double tb = std::pow(t, p.tgrid.beta);
        for (int i = 0; i < p.grid.size(); ++i) {
            double x[2];
            p.grid.coords(i, x);
            f.values[i] = amplitude * tb * std::cos(2.0 * M_PI * x[0]);
        }
        z.snapshots.push_back(f);
    }
    return z;
}

double st_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.snapshots.size(); ++i)
        for (size_t j = 0; j < a.snapshots[i].values.size(); ++j)
            m = std::max(m, std::abs(a.snapshots[i].values[j] -
                                     b.snapshots[i].values[j]));
    return m;
}

}  // namespace

TEST_CASE("manufactured solution: quadratic Hamiltonian") {
    const HjProblem p =
        manufactured(0.5, 0.5, 128, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 1.0);
    const HjSolution s = solve_hj_picard(p);
    CHECK(s.trace.converged);
    CHECK(manufactured_error(s.u, 0.5, 1.0) < 6e-3);
    // contraction at the end of the iteration
    REQUIRE(s.trace.ratios.size() >= 3);
    for (size_t i = s.trace.ratios.size() - 3; i < s.trace.ratios.size(); ++i)
        CHECK(s.trace.ratios[i] < 1.0);
}

TEST_CASE("manufactured solution: power Hamiltonian, short horizon") {
    const HjProblem p =
        manufactured(0.5, 0.1, 128, 32, Hamiltonian::Kind::power, 3.0, 1.0, 1.0);
    const HjSolution s = solve_hj_picard(p);
    CHECK(s.trace.converged);
    CHECK(manufactured_error(s.u, 0.5, 1.0) < 6e-3);
}

TEST_CASE("error decreases under time refinement") {
    double prev = 1e9;
    for (int M : {32, 64, 128}) {
        const HjProblem p = manufactured(0.7, 0.5, M, 32,
                                         Hamiltonian::Kind::quadratic, 2.0, 1.0, 1.0);
        const double e = manufactured_error(solve_hj_picard(p).u, 0.7, 1.0);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("two initial guesses reach the same fixed point") {
    const HjProblem p =
        manufactured(0.5, 0.5, 64, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 1.0);
    const HjSolution a = solve_hj_picard(p);
    const HjSolution b = solve_hj_picard(p, exact_guess(p, 1.0));
    CHECK(a.trace.converged);
    CHECK(b.trace.converged);
    CHECK(st_diff(a.u, b.u) < 10.0 * p.tol);
}

TEST_CASE("discrete residual of the computed solution is small") {
    const HjProblem p =
        manufactured(0.5, 0.5, 64, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 1.0);
    const HjSolution s = solve_hj_picard(p);
    CHECK(hj_residual(s.u, p) < 1e-5);
}

TEST_CASE("comparison bound holds for the computed solution") {
    const HjProblem p =
        manufactured(0.5, 0.5, 64, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 1.0);
    const HjSolution s = solve_hj_picard(p);
    CHECK(comparison_bound_gap(s.u, p) <= 1e-3);
}

TEST_CASE("continuation with a full-size window reproduces the direct solve") {
    const HjProblem p =
        manufactured(0.5, 0.5, 64, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 1.0);
    const SpaceTimeField direct = solve_hj_picard(p).u;
    const SpaceTimeField cont = solve_hj_continued(p, p.tgrid.t_final);
    CHECK(st_diff(direct, cont) == 0.0);  // identical code path bit for bit
}

TEST_CASE("two-window continuation stays close to the direct solve") {
    const HjProblem p =
        manufactured(0.5, 0.5, 64, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 1.0);
    const SpaceTimeField direct = solve_hj_picard(p).u;
    const SpaceTimeField cont = solve_hj_continued(p, 0.25);
    // both runs stop within tol of the same discrete fixed point
    CHECK(st_diff(direct, cont) < 1e-6);
}

TEST_CASE("non-contracting problem raises the divergence error with a trace") {
    const HjProblem p =
        manufactured(0.5, 0.5, 64, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 2.5);
    CHECK_THROWS_AS(solve_hj_picard(p), picard_divergence);
    try {
        solve_hj_picard(p);
    } catch (const picard_divergence& e) {
        CHECK(e.trace.ratios.size() >= 3);
        CHECK(e.trace.ratios.back() >= 1.0);
        CHECK(e.time_reached == p.tgrid.t_final);
    }
}

TEST_CASE("continuation reaches further than the direct solve before failing") {
    const HjProblem p =
        manufactured(0.5, 0.5, 128, 32, Hamiltonian::Kind::quadratic, 2.0, 1.0, 2.5);
    try {
        solve_hj_continued(p, 0.1);
        FAIL("expected divergence");
    } catch (const picard_divergence& e) {
        CHECK(e.time_reached > 0.05);  // made progress past the first window
        CHECK(e.time_reached < p.tgrid.t_final);
    }
}

TEST_CASE("gradient space-time norm of a static profile is exact") {
    TorusGrid g{1, 64};
    SpaceTimeField u;
    u.tgrid = TimeGrid::uniform(0.75, 16, 0.5);
    for (size_t m = 0; m < u.tgrid.nodes.size(); ++m) {
        Field f = Field::zeros(g);
        for (int i = 0; i < g.size(); ++i) {
            double x[2];
            g.coords(i, x);
            f.values[i] = std::cos(2.0 * M_PI * x[0]);
        }
        u.snapshots.push_back(f);
    }
    // |Du| = 2 pi |sin|; int |Du|^2 dx = 2 pi^2; times T, sqrt
    const double ref2 = std::sqrt(2.0 * M_PI * M_PI * 0.75);
    CHECK(gradient_lp_norm(u, 2.0) == doctest::Approx(ref2).epsilon(1e-12));
    // L4: int (2 pi)^4 sin^4 = (2 pi)^4 * 3/8
    const double ref4 = std::pow(std::pow(2.0 * M_PI, 4.0) * 0.375 * 0.75, 0.25);
    CHECK(gradient_lp_norm(u, 4.0) == doctest::Approx(ref4).epsilon(1e-12));
}

TEST_CASE("validation rejects inconsistent problems") {
    HjProblem p = manufactured(0.5, 0.5, 16, 16, Hamiltonian::Kind::quadratic,
                               2.0, 1.0, 1.0);
    p.tol = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p.tol = 1e-8;
    p.V.snapshots.pop_back();
    CHECK_THROWS_AS(p.validate(), config_error);
}
