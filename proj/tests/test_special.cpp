#include <doctest.h>

#include <cmath>

#include <stdexcept>

#include "fracdyn/special.hpp"

using namespace fracdyn;
using special::mittag_leffler;
using special::MLArgs;

namespace {

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

// Frozen extended-precision oracle values (series / asymptotic expansion
// summed at 120+ decimal digits).
struct MLOracle {
    double alpha, beta, z, value;
};
const MLOracle kOracle[] = {
    {0.3, 1.0, -2.0, 0.2902322261678753532588318},
    {0.5, 1.0, -1.0, 0.4275835761558070044107503},
    {0.5, 1.0, -4.0, 0.1369994576250613898894452},
    {0.5, 1.0, -9.0, 0.06230772403777468414653749},
    {0.7, 1.0, -8.0, 0.0460699923853623798858658},
    {0.9, 1.0, -15.0, 0.007928602432344448827776958},
    {0.9, 1.0, -60.0, 0.00180223403128461498969836},
    {0.8, 1.0, -100.0, 0.002205678868510360900372854},
    {0.6, 1.0, -30.0, 0.0152114314828014566747768},
    {1.5, 1.0, -7.0, -0.2494119804959448934680962},
    {1.5, 1.0, -80.0, -0.003634655086758034076495658},
    {0.4, 1.0, -1000.0, 0.0006712869760409519897778014},
    {0.3, 1.0, -1e6, 7.703827330424719183053313e-7},
};

}  // namespace

TEST_CASE("gamma_fn: reference values") {
    CHECK(special::gamma_fn(1.0) == 1.0);
    CHECK(special::gamma_fn(5.0) == 24.0);
    CHECK(rel_err(special::gamma_fn(0.5), 1.7724538509055160273) <= 1e-12);
    CHECK(rel_err(special::gamma_fn(1.5), 0.8862269254527580137) <= 1e-12);
    CHECK(rel_err(special::gamma_fn(0.1), 9.5135076986687318363) <= 1e-12);
    CHECK_THROWS_AS(special::gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(special::gamma_fn(-1.5), std::domain_error);
}

TEST_CASE("gamma_fn: relative error over [0.1, 50] against lgamma route") {
    for (double x = 0.1; x <= 50.0; x += 0.37) {
        double want = std::exp(std::lgamma(x));
        CHECK(rel_err(special::gamma_fn(x), want) <= 1e-12);
    }
}

TEST_CASE("reciprocal_gamma: poles and reflection") {
    CHECK(special::reciprocal_gamma(0.0) == 0.0);
    CHECK(special::reciprocal_gamma(-3.0) == 0.0);
    CHECK(special::reciprocal_gamma(1.0) == doctest::Approx(1.0));
    CHECK(special::reciprocal_gamma(-0.5) == doctest::Approx(1.0 / -3.5449077018110320546));
    CHECK(special::reciprocal_gamma(-2.5) == doctest::Approx(1.0 / -0.9453087204829418812));
}

TEST_CASE("mittag_leffler: trivial identities") {
    CHECK(rel_err(mittag_leffler(1.0, 1.0), std::exp(1.0)) <= 1e-12);
    // E_{a,b}(0) = 1/Gamma(b)
    CHECK(mittag_leffler({0.5, 2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mittag_leffler({0.7, 0.5, 0.0}) ==
          doctest::Approx(1.0 / special::gamma_fn(0.5)).epsilon(1e-14));
    // E_2(z^2) = cosh z on the positive side
    CHECK(rel_err(mittag_leffler(2.0, 4.0), std::cosh(2.0)) <= 1e-12);
}

TEST_CASE("mittag_leffler: E_{0.5,1}(1) against the series oracle") {
    CHECK(rel_err(mittag_leffler(0.5, 1.0), 5.0089800807622834663) <= 1e-10);
}

TEST_CASE("mittag_leffler: frozen negative-axis oracle table") {
    for (const auto& o : kOracle) {
        double got = mittag_leffler({o.alpha, o.beta, o.z});
        INFO("alpha=", o.alpha, " z=", o.z, " got=", got, " want=", o.value);
        CHECK(rel_err(got, o.value) <= 1e-8);
    }
}

TEST_CASE("mittag_leffler: E_1 agrees with exp on [-50, 5]") {
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        double z = -50.0 + 55.0 * i / 1000.0;
        worst = std::max(worst, rel_err(mittag_leffler(1.0, z), std::exp(z)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("mittag_leffler: monotone relaxation envelope") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double lambda : {0.2, 1.0}) {
            double prev = mittag_leffler(alpha, 0.0);
            for (int i = 1; i <= 1000; ++i) {
                double t = 100.0 * i / 1000.0;
                double v = mittag_leffler(alpha, -lambda * std::pow(t, alpha));
                INFO("alpha=", alpha, " lambda=", lambda, " t=", t);
                CHECK(v <= prev + 1e-10);
                prev = v;
            }
        }
    }
}

TEST_CASE("mittag_leffler: regime continuity at the Taylor switchover") {
    for (double alpha : {0.4, 0.6, 0.8, 1.0}) {
        double z_star = -special::detail::taylor_limit(alpha);
        double inside = special::detail::ml_taylor(alpha, 1.0, z_star * (1.0 - 1e-9));
        double outside = mittag_leffler(alpha, z_star * (1.0 + 1e-9));
        INFO("alpha=", alpha, " z*=", z_star);
        CHECK(std::fabs(inside - outside) <=
              1e-7 * std::max(1.0, std::fabs(inside)));
    }
}

TEST_CASE("mittag_leffler: domain errors") {
    CHECK_THROWS_AS(mittag_leffler({-0.5, 1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(mittag_leffler({0.0, 1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(mittag_leffler({2.5, 1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(mittag_leffler({0.5, 0.0, 1.0}), std::domain_error);
}

TEST_CASE("mittag_leffler: deep negative support") {
    // Must evaluate without error far beyond the accuracy-contract range.
    double v = mittag_leffler(0.5, -1e6);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v < 1e-2);
}
