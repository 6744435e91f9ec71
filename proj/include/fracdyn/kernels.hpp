#pragma once

// Data-parallel inner loops used by the fractional-memory convolutions.
//
// The time-stepper spends almost all of its work in length-k weighted sums
// over the stored derivative history (one per step, per component), so these
// three primitives get scalar reference implementations plus SIMD variants
// (AVX2+FMA on x86-64, NEON on aarch64) selected once at startup from CPU
// capabilities. The scalar versions are the semantic reference; the SIMD
// paths are equivalence-tested against them.

#include <cstddef>
#include <span>

namespace fracdyn::kernels {

/// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

/// sum_i a[i] * b[n-1-i]  (one operand traversed backwards; this is the
/// natural access pattern of a discrete convolution evaluated at one node)
double dot_rev(std::span<const double> a, std::span<const double> b);

/// max_i |a[i] - b[i]|, 0 for empty spans
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Name of the backend the dispatcher selected ("scalar", "avx2", "neon").
const char* active_backend();

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double dot_rev(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define FRACDYN_HAVE_AVX2_KERNELS 1
namespace avx2 {
bool supported();
double dot(const double* a, const double* b, std::size_t n);
double dot_rev(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define FRACDYN_HAVE_NEON_KERNELS 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double dot_rev(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace neon
#endif

}  // namespace fracdyn::kernels
