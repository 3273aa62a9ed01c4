#pragma once

#include <cstddef>

// Data-parallel inner loops behind a runtime-selected instruction set.
// Every variant must agree with the scalar reference up to summation order.
namespace swlqr::kernels {

enum class Isa { Scalar, Avx2, Neon };

const char* to_string(Isa isa);

struct Moments {
    double m0 = 0.0;  // sum w
    double m1 = 0.0;  // sum w x
    double m2 = 0.0;  // sum w x^2
};

using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);
using DotFn = double (*)(const double* x, const double* y, std::size_t n);
using MomentsFn = Moments (*)(const double* w, const double* x, std::size_t n);

struct KernelTable {
    Isa isa;
    AxpyFn axpy;
    DotFn dot;
    MomentsFn moments;
};

// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* table_for(Isa isa);

// Best available variant, unless SWLQR_ISA=scalar|avx2|neon names another one.
const KernelTable& active();

// Test hook; returns the previously active variant. Throws if unavailable.
Isa set_active(Isa isa);

// y += alpha x
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline Moments moments(const double* w, const double* x, std::size_t n) { return active().moments(w, x, n); }

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace swlqr::kernels
