#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracdyn/fraccore.hpp"
#include "fracdyn/special.hpp"

using namespace fracdyn;

namespace {

Trajectory constant_trajectory(double value, double h, int n_steps, int delay_steps) {
    Trajectory t;
    UniformGrid g{h, n_steps, delay_steps};
    t.resize(1, g);
    for (int k = -delay_steps; k <= n_steps; ++k) t.state(0, k) = value;
    return t;
}

}  // namespace

TEST_CASE("rect/trap weights reduce to the classical rules at alpha = 1") {
    const double h = 0.1;
    auto rw = rect_weights(1.0, 10, h);
    for (int m = 1; m <= 10; ++m) CHECK(rw[m] == doctest::Approx(h).epsilon(1e-14));

    auto tw = trap_weights(1.0, 10, h);
    CHECK(tw.scale == doctest::Approx(h / 2.0));
    for (int m = 1; m <= 10; ++m) CHECK(tw.interior[m] == doctest::Approx(2.0).epsilon(1e-13));
    for (int k = 1; k <= 10; ++k) CHECK(tw.first[k] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("I^alpha of 1 equals t^alpha / Gamma(alpha+1) for both rules") {
    const double h = 1.0 / 128.0;
    const int n = 128;
    for (double alpha : {0.3, 0.5, 0.9, 1.0}) {
        auto rw = rect_weights(alpha, n, h);
        auto tw = trap_weights(alpha, n, h);
        std::vector<double> ones(n + 1, 1.0);
        for (int k : {1, 7, 64, 128}) {
            double want = std::pow(k * h, alpha) / special::gamma_fn(alpha + 1.0);
            CHECK(rect_integral(rw, ones, k) == doctest::Approx(want).epsilon(1e-12));
            CHECK(trap_integral(tw, ones, k) == doctest::Approx(want).epsilon(1e-12));
        }
    }
    // alpha = 0.5, t = 1, f = 1 -> 1/Gamma(1.5)
    auto tw = trap_weights(0.5, n, h);
    std::vector<double> ones(n + 1, 1.0);
    CHECK(trap_integral(tw, ones, n) ==
          doctest::Approx(1.0 / special::gamma_fn(1.5)).epsilon(1e-12));
}

TEST_CASE("quadrature convergence: rectangle first order on u = t, trapezoid on u = t^2") {
    // Product-rectangle error on a linear integrand decays at first order;
    // the trapezoidal rule is exact on linears, so its order is probed on a
    // quadratic. Both halvings must shrink the error by at least 2x.
    const double alpha = 0.5;
    double prev_rect = -1.0, prev_trap = -1.0;
    for (int n : {64, 128, 256, 512}) {
        double h = 1.0 / n;
        auto rw = rect_weights(alpha, n, h);
        auto tw = trap_weights(alpha, n, h);
        std::vector<double> lin(n + 1), quad(n + 1);
        for (int k = 0; k <= n; ++k) {
            lin[k] = k * h;
            quad[k] = (k * h) * (k * h);
        }
        // I^alpha t = t^{1+alpha} / Gamma(2+alpha), I^alpha t^2 = 2 t^{2+alpha}/Gamma(3+alpha)
        double want_lin = 1.0 / special::gamma_fn(2.0 + alpha);
        double want_quad = 2.0 / special::gamma_fn(3.0 + alpha);
        double err_rect = std::fabs(rect_integral(rw, lin, n) - want_lin);
        double err_trap = std::fabs(trap_integral(tw, quad, n) - want_quad);
        if (prev_rect > 0.0) {
            CHECK(err_rect * 2.0 <= prev_rect * 1.05);
            CHECK(err_trap * 2.0 <= prev_trap * 1.05);
        }
        prev_rect = err_rect;
        prev_trap = err_trap;
    }
}

TEST_CASE("semigroup spot-check: I^0.4 I^0.4 1 = I^0.8 1") {
    const int n = 256;
    const double h = 1.0 / n;
    auto w4 = trap_weights(0.4, n, h);
    std::vector<double> ones(n + 1, 1.0), inner(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) inner[k] = trap_integral(w4, ones, k);
    for (int k : {32, 128, 256}) {
        double got = trap_integral(w4, inner, k);
        double want = std::pow(k * h, 0.8) / special::gamma_fn(1.8);
        CHECK(std::fabs(got - want) <= 5.0 * h);
    }
}

TEST_CASE("caputo_derivative_grid: constants, linears, classical limit") {
    const int n = 100;
    const double h = 0.01;
    std::vector<double> c(n + 1, 3.7);
    auto dc = caputo_derivative_grid(c, 0.5, h);
    for (int k = 0; k <= n; ++k) CHECK(dc[k] == 0.0);

    // x(t) = t at alpha = 0.5: exact derivative t^{0.5}/Gamma(1.5) (L1 is
    // exact on piecewise-linear data).
    std::vector<double> lin(n + 1);
    for (int k = 0; k <= n; ++k) lin[k] = k * h;
    auto dl = caputo_derivative_grid(lin, 0.5, h);
    for (int k : {1, 10, 100}) {
        double want = std::pow(k * h, 0.5) / special::gamma_fn(1.5);
        CHECK(dl[k] == doctest::Approx(want).epsilon(1e-12));
    }

    // alpha = 1 on x = t^2 reduces to backward differences ~ 2t + O(h).
    std::vector<double> sq(n + 1);
    for (int k = 0; k <= n; ++k) sq[k] = (k * h) * (k * h);
    auto ds = caputo_derivative_grid(sq, 1.0, h);
    for (int k : {1, 50, 100}) {
        double fd = (sq[k] - sq[k - 1]) / h;
        CHECK(ds[k] == doctest::Approx(fd).epsilon(1e-12));
        CHECK(std::fabs(ds[k] - 2.0 * k * h) <= 1.5 * h);
    }

    CHECK_THROWS_AS(caputo_derivative_grid(std::vector<double>{1.0}, 0.5, h),
                    std::invalid_argument);
}

TEST_CASE("caputo of I^alpha recovers smooth integrands within O(h)") {
    // The composition D^alpha I^alpha f = f is recovered at O(h) once the
    // constant part of f is split off: I^alpha of f(0) contributes a t^alpha
    // term whose piecewise-linear (L1) derivative is poor at the very first
    // nodes, so the clean statement is in terms of f(t) - f(0).
    const int n = 512;
    const double h = 1.0 / n;
    for (double alpha : {0.4, 0.7}) {
        auto tw = trap_weights(alpha, n, h);
        std::vector<double> f(n + 1), g(n + 1), y(n + 1);
        for (int k = 0; k <= n; ++k) {
            double t = k * h;
            f[k] = 1.0 + t - 0.5 * t * t + t * t * t / 6.0;
            g[k] = f[k] - f[0];
        }
        for (int k = 0; k <= n; ++k) y[k] = 2.0 + trap_integral(tw, g, k);
        auto d = caputo_derivative_grid(y, alpha, h);
        double worst = 0.0;
        for (int k = 1; k <= n; ++k) worst = std::max(worst, std::fabs(d[k] - g[k]));
        INFO("alpha=", alpha, " worst=", worst);
        CHECK(worst <= 20.0 * h);

        // With the constant retained, the recovery still holds away from 0.
        for (int k = 0; k <= n; ++k) y[k] = 2.0 + trap_integral(tw, f, k);
        d = caputo_derivative_grid(y, alpha, h);
        double worst_away = 0.0;
        for (int k = n / 4; k <= n; ++k)
            worst_away = std::max(worst_away, std::fabs(d[k] - f[k]));
        CHECK(worst_away <= 20.0 * h);
    }
}

TEST_CASE("history function kinds") {
    auto c = HistoryFunction::constant({2.0, -1.0});
    CHECK(c.eval_component(-0.3, 0) == 2.0);
    CHECK(c.eval_component(0.0, 1) == -1.0);

    auto p = HistoryFunction::polynomial({{1.0, 2.0}, {0.0, 0.0, 3.0}});
    CHECK(p.eval_component(-0.5, 0) == doctest::Approx(0.0));
    CHECK(p.eval_component(-2.0, 1) == doctest::Approx(12.0));

    auto s = HistoryFunction::sampled({{1.0, 2.0, 4.0}}, 0.5);  // nodes -1, -0.5, 0
    CHECK(s.eval_component(0.0, 0) == 4.0);
    CHECK(s.eval_component(-1.0, 0) == 1.0);
    CHECK(s.eval_component(-0.5, 0) == 2.0);
    CHECK(s.eval_component(-0.25, 0) == doctest::Approx(3.0));
}

TEST_CASE("apply_memory_operator: discrete delay with history lookup") {
    const double h = 0.25;
    Trajectory traj = constant_trajectory(0.0, h, 8, 4);  // tau = 1
    // history ramp, future ramp
    for (int k = -4; k <= 8; ++k) traj.state(0, k) = k * h;
    auto spec = MemoryOperatorSpec::discrete_delay(1.0);
    // t < tau reads the history
    auto v0 = apply_memory_operator(spec, traj, 2);
    CHECK(v0[0] == doctest::Approx((2 - 4) * h));
    auto v1 = apply_memory_operator(spec, traj, 8);
    CHECK(v1[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(apply_memory_operator(spec, traj, -1), std::out_of_range);
}

TEST_CASE("apply_memory_operator: delay with constant history returns the constant") {
    Trajectory traj = constant_trajectory(3.25, 0.1, 10, 5);
    auto spec = MemoryOperatorSpec::discrete_delay(0.5);
    for (int k = 0; k <= 5; ++k)
        CHECK(apply_memory_operator(spec, traj, k)[0] == doctest::Approx(3.25));
}

TEST_CASE("apply_memory_operator: fractional integral of 1 at t = 1") {
    const int n = 200;
    Trajectory traj = constant_trajectory(1.0, 1.0 / n, n, 0);
    auto spec = MemoryOperatorSpec::fractional_integral(0.5);
    auto v = apply_memory_operator(spec, traj, n);
    CHECK(v[0] == doctest::Approx(1.0 / special::gamma_fn(1.5)).epsilon(1e-12));
}

TEST_CASE("apply_memory_operator: distributed kernel, beta = 1, g = 1, phi = u") {
    const int n = 100;
    Trajectory traj = constant_trajectory(1.0, 2.0 / n, n, 0);
    auto spec = MemoryOperatorSpec::distributed(1.0);
    auto v = apply_memory_operator(spec, traj, n);  // plain integral of 1 over [0, 2]
    CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-12));
    auto none = apply_memory_operator(MemoryOperatorSpec::none(), traj, n);
    CHECK(none[0] == 0.0);
}

TEST_CASE("memory spec validation") {
    CHECK_THROWS_AS(MemoryOperatorSpec::discrete_delay(0.0), std::invalid_argument);
    CHECK_THROWS_AS(MemoryOperatorSpec::fractional_integral(1.5), std::invalid_argument);
    CHECK_THROWS_AS(MemoryOperatorSpec::fractional_integral(0.0), std::invalid_argument);
}
