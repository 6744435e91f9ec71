#pragma once

// Gamma and Mittag-Leffler evaluation.
//
// E_{a,b}(z) = sum_k z^k / Gamma(a k + b) is computed by three cooperating
// methods on the real line:
//
//   1. Taylor series with compensated (Kahan) summation. Used whenever the
//      alternating-series amplification a*|z|^(1/a) stays below ~12, i.e.
//      for z >= -z_star(a) with z_star(a) = (12/a)^a. Empirically chosen:
//      past that point the largest series term exceeds ~e^12 times the
//      result and per-term rounding swamps the 1e-8 contract.
//   2. Asymptotic power tail -sum_{k>=1} z^-k / Gamma(b - a k) for large
//      negative z (plus the oscillatory saddle pair for a > 1). Truncated
//      at its smallest term; the implementation reports failure when that
//      term is still too large relative to the partial sum.
//   3. A quadrature of the standard integral representation on the cut
//      (0 < a < 1, z < 0) covering the band where neither expansion is
//      trustworthy.

#include <optional>

namespace fracdyn::special {

/// Two-parameter Mittag-Leffler arguments. alpha in (0,2], beta > 0.
struct MLArgs {
    double alpha;
    double beta = 1.0;
    double z = 0.0;
};

/// Gamma(x) for x > 0. Throws std::domain_error otherwise.
double gamma_fn(double x);

/// 1/Gamma(x) for any real x; exact zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

/// E_{alpha,beta}(z) on the real line. Throws std::domain_error for
/// alpha <= 0, alpha > 2 or beta <= 0.
double mittag_leffler(const MLArgs& args);

/// Convenience one-parameter form E_alpha(z).
double mittag_leffler(double alpha, double z);

namespace detail {

/// Taylor-series path (valid for z >= -taylor_limit(alpha)).
double ml_taylor(double alpha, double beta, double z);

/// Asymptotic path for z << 0; nullopt when the optimally truncated tail
/// cannot reach the requested accuracy at this argument.
std::optional<double> ml_asymptotic(double alpha, double beta, double z);

/// Integral-representation path, 0 < alpha < 1, z < 0.
double ml_integral(double alpha, double beta, double z);

/// Largest |z| (z < 0) the Taylor path accepts for this alpha.
double taylor_limit(double alpha);

}  // namespace detail

}  // namespace fracdyn::special
