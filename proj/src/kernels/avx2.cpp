#include "swlqr/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#define SWLQR_AVX2 __attribute__((target("avx2,fma")))

namespace swlqr::kernels::detail {

namespace {

SWLQR_AVX2 double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

SWLQR_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        y0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), y0);
        y1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i + 4), y1);
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

SWLQR_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

SWLQR_AVX2 Moments moments_avx2(const double* w, const double* x, std::size_t n) {
    __m256d m0 = _mm256_setzero_pd();
    __m256d m1 = _mm256_setzero_pd();
    __m256d m2 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wv = _mm256_loadu_pd(w + i);
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d wx = _mm256_mul_pd(wv, xv);
        m0 = _mm256_add_pd(m0, wv);
        m1 = _mm256_add_pd(m1, wx);
        m2 = _mm256_fmadd_pd(wx, xv, m2);
    }
    Moments m{hsum(m0), hsum(m1), hsum(m2)};
    for (; i < n; ++i) {
        const double wx = w[i] * x[i];
        m.m0 += w[i];
        m.m1 += wx;
        m.m2 += wx * x[i];
    }
    return m;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{Isa::Avx2, axpy_avx2, dot_avx2, moments_avx2};
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &table : nullptr;
}

}  // namespace swlqr::kernels::detail

#else

namespace swlqr::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace swlqr::kernels::detail

#endif
