// AVX2+FMA variants of the convolution kernels. Compiled with -mavx2 -mfma
// in its own translation unit; callers go through the runtime dispatcher.

#include "fracdyn/kernels.hpp"

#if defined(FRACDYN_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <cmath>

namespace fracdyn::kernels::avx2 {

bool supported() {
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot_rev(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        // b traversed backwards: load the 4 doubles ending at b[n-1-i] and
        // reverse the lanes so lane j multiplies a[i+j] with b[n-1-i-j].
        __m256d b0 = _mm256_permute4x64_pd(_mm256_loadu_pd(b + (n - 4 - i)), 0x1B);
        __m256d b1 = _mm256_permute4x64_pd(_mm256_loadu_pd(b + (n - 8 - i)), 0x1B);
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), b0, acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), b1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d bv = _mm256_permute4x64_pd(_mm256_loadu_pd(b + (n - 4 - i)), 0x1B);
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), bv, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[n - 1 - i];
    return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, d));
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_max_pd(lo, hi);
    double m = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) {
        double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

}  // namespace fracdyn::kernels::avx2

#endif  // FRACDYN_HAVE_AVX2_KERNELS
