#include "fracdyn/kernels.hpp"

#include <cmath>

namespace fracdyn::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    // Four independent accumulators; matches the lane structure of the SIMD
    // paths closely enough that results agree to ~1 ulp per element.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot_rev(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double* br = b + (n - 1 - i);
        s0 += a[i] * br[0];
        s1 += a[i + 1] * br[-1];
        s2 += a[i + 2] * br[-2];
        s3 += a[i + 3] * br[-3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += a[i] * b[n - 1 - i];
    return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

}  // namespace scalar

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);

struct Dispatch {
    DotFn dot;
    DotFn dot_rev;
    DotFn max_abs_diff;
    const char* name;
};

Dispatch select_backend() {
#if defined(FRACDYN_HAVE_AVX2_KERNELS)
    if (avx2::supported())
        return {&avx2::dot, &avx2::dot_rev, &avx2::max_abs_diff, "avx2"};
#endif
#if defined(FRACDYN_HAVE_NEON_KERNELS)
    return {&neon::dot, &neon::dot_rev, &neon::max_abs_diff, "neon"};
#endif
    return {&scalar::dot, &scalar::dot_rev, &scalar::max_abs_diff, "scalar"};
}

const Dispatch& backend() {
    static const Dispatch d = select_backend();
    return d;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    return backend().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

double dot_rev(std::span<const double> a, std::span<const double> b) {
    return backend().dot_rev(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return backend().max_abs_diff(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

const char* active_backend() { return backend().name; }

}  // namespace fracdyn::kernels
