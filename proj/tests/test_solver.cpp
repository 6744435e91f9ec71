#include <doctest.h>

#include <cmath>

#include "fracdyn/fraccore.hpp"
#include "fracdyn/solver.hpp"
#include "fracdyn/special.hpp"

using namespace fracdyn;

namespace {

ProblemSpec linear_relaxation(double alpha, double x0, double T) {
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = alpha;
    p.T = T;
    p.x0 = {x0};
    p.lipschitz = 1.0;
    p.rhs = [](double, std::span<const double> x, std::span<const double>,
               std::span<const double>, std::span<double> out) { out[0] = -x[0]; };
    return p;
}

double self_consistency(const Trajectory& traj, const ProblemSpec& p) {
    std::vector<double> xk(p.dimension), dk(p.dimension), fk(p.dimension);
    double worst = 0.0;
    for (int k = 0; k <= traj.grid.n_steps; ++k) {
        for (int c = 0; c < p.dimension; ++c) {
            xk[c] = traj.state(c, k);
            dk[c] = traj.deriv(c, k);
        }
        auto mem = apply_memory_operator(p.memory, traj, k);
        p.rhs(traj.grid.time(k), xk, dk, mem, fk);
        for (int c = 0; c < p.dimension; ++c)
            worst = std::max(worst, std::fabs(dk[c] - fk[c]));
    }
    return worst;
}

}  // namespace

TEST_CASE("solve: zero dynamics stays constant with one inner iteration") {
    ProblemSpec p;
    p.dimension = 2;
    p.alpha = 0.6;
    p.T = 1.0;
    p.x0 = {4.0, -2.0};
    p.rhs = [](double, std::span<const double>, std::span<const double>,
               std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
        out[1] = 0.0;
    };
    Trajectory traj = solve(p, {0.05, 1e-12, 50, 1.0});
    for (int k = 0; k <= traj.grid.n_steps; ++k) {
        CHECK(traj.state(0, k) == 4.0);
        CHECK(traj.state(1, k) == -2.0);
        CHECK(traj.deriv(0, k) == 0.0);
        CHECK(traj.inner_iters[k] == 1);
    }
}

TEST_CASE("solve: d-independent F converges in one inner iteration") {
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = 0.8;
    p.T = 0.5;
    p.x0 = {0.0};
    p.rhs = [](double t, std::span<const double>, std::span<const double>,
               std::span<const double>, std::span<double> out) { out[0] = std::cos(t); };
    Trajectory traj = solve(p, {0.01, 1e-10, 50, 1.0});
    for (int k = 0; k <= traj.grid.n_steps; ++k) CHECK(traj.inner_iters[k] == 1);
}

TEST_CASE("solve: classical limit matches exp(-t)") {
    ProblemSpec p = linear_relaxation(1.0, 1.0, 1.0);
    Trajectory traj = solve(p, {1e-3, 1e-12, 100, 1.0});
    double x1 = traj.state(0, traj.grid.n_steps);
    CHECK(std::fabs(x1 - std::exp(-1.0)) <= 1e-3);
    CHECK(self_consistency(traj, p) <= 1e-12);
}

TEST_CASE("solve: fractional relaxation matches the Mittag-Leffler oracle") {
    ProblemSpec p = linear_relaxation(0.5, 1.0, 1.0);
    Trajectory traj = solve(p, {1e-3, 1e-12, 100, 1.0});
    for (double t : {0.5, 1.0}) {
        int k = static_cast<int>(std::lround(t / traj.grid.h));
        double want = special::mittag_leffler(0.5, -std::pow(t, 0.5));
        CHECK(std::fabs(traj.state(0, k) - want) <= 1e-2);
    }
    CHECK(self_consistency(traj, p) <= 1e-12);
}

TEST_CASE("solve: implicit fixed point d = 0.5 d + x resolves to d = 2x") {
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = 0.7;
    p.T = 1.0;
    p.x0 = {1.0};
    p.rhs = [](double, std::span<const double> x, std::span<const double> d,
               std::span<const double>, std::span<double> out) {
        out[0] = 0.5 * d[0] + x[0];
    };
    SolverConfig cfg{0.01, 1e-11, 100, 1.0};
    Trajectory traj = solve(p, cfg);
    for (int k = 0; k <= traj.grid.n_steps; ++k) {
        CHECK(std::fabs(traj.deriv(0, k) - 2.0 * traj.state(0, k)) <= 1e-9);
    }
}

TEST_CASE("solve: undamped iteration beyond the contraction limit diverges") {
    // dF/dd = 1.5 with damping 0.5 has iteration factor |1 - 0.5 + 0.75| = 1.25.
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = 0.5;
    p.T = 0.5;
    p.x0 = {1.0};
    p.rhs = [](double, std::span<const double> x, std::span<const double> d,
               std::span<const double>, std::span<double> out) {
        out[0] = 1.5 * d[0] + x[0];
    };
    CHECK_THROWS_AS(solve(p, {0.01, 1e-12, 100, 0.5}), SolveError);
    try {
        solve(p, {0.01, 1e-12, 100, 0.5});
    } catch (const SolveError& e) {
        CHECK(e.kind() == SolveError::Kind::Divergence);
        CHECK(e.step() >= 0);
    }
}

TEST_CASE("solve: blow-up is reported with the step index") {
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = 1.0;
    p.T = 2.0;
    p.x0 = {1.0};
    p.rhs = [](double, std::span<const double> x, std::span<const double>,
               std::span<const double>, std::span<double> out) {
        out[0] = x[0] * x[0] * 1e150;  // overflows quickly
    };
    try {
        solve(p, {0.1, 1e-10, 50, 1.0});
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.kind() == SolveError::Kind::BlowUp);
    }
}

TEST_CASE("solve: delayed problem reproduces its history exactly") {
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = 0.9;
    p.T = 2.0;
    p.memory = MemoryOperatorSpec::discrete_delay(0.3);
    p.history = HistoryFunction::polynomial({{1.0, 0.5}});  // 1 + 0.5 t
    p.x0 = {1.0};
    p.rhs = [](double, std::span<const double> x, std::span<const double>,
               std::span<const double> m, std::span<double> out) {
        out[0] = -x[0] + 0.5 * m[0];
    };
    SolverConfig cfg{0.02, 1e-12, 100, 1.0};
    double h = aligned_step(p, cfg.h);
    CHECK(std::fmod(0.3 / h, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(h <= cfg.h + 1e-15);
    Trajectory traj = solve(p, cfg);
    for (int k = -traj.grid.delay_steps; k < 0; ++k) {
        double t = k * traj.grid.h;
        CHECK(traj.state(0, k) == p.history.eval_component(t, 0));
    }
    CHECK(self_consistency(traj, p) <= 1e-11);
}

TEST_CASE("solve: Lipschitz memory channel through a fractional integral") {
    // D^alpha x = -x + 0.25 I^0.5 x is implicit through the memory endpoint.
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = 0.5;
    p.T = 1.0;
    p.memory = MemoryOperatorSpec::fractional_integral(0.5);
    p.x0 = {1.0};
    p.rhs = [](double, std::span<const double> x, std::span<const double>,
               std::span<const double> m, std::span<double> out) {
        out[0] = -x[0] + 0.25 * m[0];
    };
    Trajectory traj = solve(p, {0.01, 1e-12, 100, 1.0});
    CHECK(self_consistency(traj, p) <= 1e-10);
    CHECK(traj.state(0, traj.grid.n_steps) > 0.0);
}

TEST_CASE("solve: convergence order on the fractional relaxation problem") {
    // Observed order must stay within 0.2 of min(2, 1+alpha).
    for (double alpha : {0.5, 1.0}) {
        std::vector<double> errs;
        for (int e = 6; e <= 10; ++e) {
            double h = std::pow(2.0, -e);
            ProblemSpec p = linear_relaxation(alpha, 1.0, 1.0);
            Trajectory traj = solve(p, {h, 1e-13, 100, 1.0});
            double want = alpha == 1.0 ? std::exp(-1.0)
                                       : special::mittag_leffler(alpha, -1.0);
            errs.push_back(std::fabs(traj.state(0, traj.grid.n_steps) - want));
        }
        double order_min = 1e9;
        for (std::size_t i = 1; i < errs.size(); ++i)
            order_min = std::min(order_min, std::log2(errs[i - 1] / errs[i]));
        INFO("alpha=", alpha, " errors: ", errs[0], " ", errs[1], " ", errs[2], " ", errs[3],
             " ", errs[4]);
        CHECK(order_min >= std::min(2.0, 1.0 + alpha) - 0.2);
    }
}

TEST_CASE("weighted_norm_distance") {
    ProblemSpec p = linear_relaxation(1.0, 1.0, 1.0);
    Trajectory a = solve(p, {0.1, 1e-10, 50, 1.0});
    Trajectory b = a;
    CHECK(weighted_norm_distance(a, b, 1.0) == 0.0);

    for (int k = 0; k <= b.grid.n_steps; ++k) b.state(0, k) += 0.5;
    CHECK(weighted_norm_distance(a, b, 0.0) == doctest::Approx(0.5));

    // difference e^{rho t} is flattened exactly by the weight
    const double rho = 2.0;
    Trajectory c = a;
    for (int k = 0; k <= c.grid.n_steps; ++k)
        c.state(0, k) = a.state(0, k) + std::exp(rho * c.grid.time(k));
    CHECK(weighted_norm_distance(a, c, rho) == doctest::Approx(1.0).epsilon(1e-12));

    Trajectory d;
    d.resize(1, {0.05, 3, 0});
    CHECK_THROWS_AS(weighted_norm_distance(a, d, 1.0), std::invalid_argument);
}

TEST_CASE("problem validation catches inconsistent history") {
    ProblemSpec p;
    p.dimension = 1;
    p.alpha = 0.5;
    p.T = 1.0;
    p.memory = MemoryOperatorSpec::discrete_delay(0.25);
    p.history = HistoryFunction::constant({2.0});
    p.x0 = {1.0};  // != history(0)
    p.rhs = [](double, std::span<const double>, std::span<const double>,
               std::span<const double>, std::span<double> out) { out[0] = 0.0; };
    CHECK_THROWS_AS(solve(p, {0.05, 1e-10, 50, 1.0}), std::invalid_argument);
}
