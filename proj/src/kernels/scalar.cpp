#include "swlqr/kernels.hpp"

namespace swlqr::kernels::detail {

namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

Moments moments_scalar(const double* w, const double* x, std::size_t n) {
    Moments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double wx = w[i] * x[i];
        m.m0 += w[i];
        m.m1 += wx;
        m.m2 += wx * x[i];
    }
    return m;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::Scalar, axpy_scalar, dot_scalar, moments_scalar};
    return table;
}

}  // namespace swlqr::kernels::detail
