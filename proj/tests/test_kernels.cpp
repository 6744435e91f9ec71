#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fracdyn/kernels.hpp"

using namespace fracdyn;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += (long double)a[i] * b[i];
    return (double)s;
}

double ref_dot_rev(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) s += (long double)a[i] * b[n - 1 - i];
    return (double)s;
}

}  // namespace

TEST_CASE("kernels: scalar reference matches long-double oracle") {
    std::mt19937_64 rng(42);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 64u, 1001u}) {
        auto a = random_vec(rng, n, 2.0);
        auto b = random_vec(rng, n, 2.0);
        double tol = 1e-13 * (n + 1);
        CHECK(std::fabs(kernels::scalar::dot(a.data(), b.data(), n) - ref_dot(a, b)) <= tol);
        CHECK(std::fabs(kernels::scalar::dot_rev(a.data(), b.data(), n) - ref_dot_rev(a, b)) <=
              tol);
    }
}

TEST_CASE("kernels: dispatched backends agree with the scalar reference") {
    std::mt19937_64 rng(7);
    INFO("active backend: ", kernels::active_backend());
    for (std::size_t n = 0; n <= 130; ++n) {
        auto a = random_vec(rng, n, 3.0);
        auto b = random_vec(rng, n, 3.0);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::fabs(a[i] * b[i]);
        double tol = 1e-15 * (scale + 1.0) * (n + 1);
        CHECK(std::fabs(kernels::dot(a, b) - kernels::scalar::dot(a.data(), b.data(), n)) <= tol);
        CHECK(std::fabs(kernels::dot_rev(a, b) -
                        kernels::scalar::dot_rev(a.data(), b.data(), n)) <= tol);
        CHECK(kernels::max_abs_diff(a, b) ==
              doctest::Approx(kernels::scalar::max_abs_diff(a.data(), b.data(), n))
                  .epsilon(1e-15));
    }
}

#if defined(FRACDYN_HAVE_AVX2_KERNELS)
TEST_CASE("kernels: avx2 variants match scalar when supported") {
    if (!kernels::avx2::supported()) return;
    std::mt19937_64 rng(99);
    for (std::size_t n : {1u, 2u, 5u, 8u, 9u, 16u, 31u, 32u, 33u, 257u, 4096u}) {
        auto a = random_vec(rng, n, 1.0);
        auto b = random_vec(rng, n, 1.0);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::fabs(a[i] * b[i]);
        double tol = 1e-15 * (scale + 1.0) * (n + 1);
        CHECK(std::fabs(kernels::avx2::dot(a.data(), b.data(), n) -
                        kernels::scalar::dot(a.data(), b.data(), n)) <= tol);
        CHECK(std::fabs(kernels::avx2::dot_rev(a.data(), b.data(), n) -
                        kernels::scalar::dot_rev(a.data(), b.data(), n)) <= tol);
        CHECK(kernels::avx2::max_abs_diff(a.data(), b.data(), n) ==
              kernels::scalar::max_abs_diff(a.data(), b.data(), n));
    }
}
#endif

TEST_CASE("kernels: dot_rev reverses exactly one operand") {
    std::vector<double> a{1.0, 2.0, 3.0};
    std::vector<double> b{10.0, 20.0, 30.0};
    // 1*30 + 2*20 + 3*10 = 100
    CHECK(kernels::dot_rev(a, b) == doctest::Approx(100.0));
    CHECK(kernels::dot(a, b) == doctest::Approx(10.0 + 40.0 + 90.0));
}
