#include "swlqr/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace swlqr::kernels::detail {

namespace {

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), a, vld1q_f64(x + i)));
        vst1q_f64(y + i + 2, vfmaq_f64(vld1q_f64(y + i + 2), a, vld1q_f64(x + i + 2)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0);
    float64x2_t s1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 = vfmaq_f64(s0, vld1q_f64(x + i), vld1q_f64(y + i));
        s1 = vfmaq_f64(s1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(s0, s1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

Moments moments_neon(const double* w, const double* x, std::size_t n) {
    float64x2_t m0 = vdupq_n_f64(0.0);
    float64x2_t m1 = vdupq_n_f64(0.0);
    float64x2_t m2 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t wv = vld1q_f64(w + i);
        const float64x2_t xv = vld1q_f64(x + i);
        const float64x2_t wx = vmulq_f64(wv, xv);
        m0 = vaddq_f64(m0, wv);
        m1 = vaddq_f64(m1, wx);
        m2 = vfmaq_f64(m2, wx, xv);
    }
    Moments m{vaddvq_f64(m0), vaddvq_f64(m1), vaddvq_f64(m2)};
    for (; i < n; ++i) {
        const double wx = w[i] * x[i];
        m.m0 += w[i];
        m.m1 += wx;
        m.m2 += wx * x[i];
    }
    return m;
}

}  // namespace

// Advanced SIMD is mandatory on AArch64, so no runtime probe is needed.
const KernelTable* neon_table() {
    static const KernelTable table{Isa::Neon, axpy_neon, dot_neon, moments_neon};
    return &table;
}

}  // namespace swlqr::kernels::detail

#else

namespace swlqr::kernels::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace swlqr::kernels::detail

#endif
