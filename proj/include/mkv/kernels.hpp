#pragma once

#include <cstddef>

namespace mkv::kernels {

// Data-parallel inner-loop kernels used by the ensemble stepper, the linear
// solvers, and the grid diagnostics. A scalar reference implementation is
// always available; vector variants (AVX2 on x86-64, NEON on aarch64) are
// selected at runtime from CPU capabilities, overridable with the
// HOOKEAN_MKV_SIMD environment variable (auto|scalar|avx2|neon).
//
// Elementwise kernels (axpy, scale_add, triad) produce bitwise-identical
// results across backends: every backend applies the same fused
// multiply-add per element. Reductions accumulate in lanes and merge in a
// fixed order, so they are deterministic per backend but may differ from the
// scalar reference by rounding; equivalence tests bound that difference.

struct Ops {
    const char* name;

    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    // z[i] = a * x[i] + b * y[i]
    void (*scale_add)(double a, const double* x, double b, const double* y,
                      double* z, std::size_t n);

    // v[i] = c1 * v[i] + c2 * d[i] + c3 * g[i]
    // (Ornstein-Uhlenbeck / Euler-Maruyama update shape.)
    void (*triad)(double c1, double* v, double c2, const double* d, double c3,
                  const double* g, std::size_t n);

    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);

    // Σ w[i] * x[i]
    double (*weighted_sum)(const double* w, const double* x, std::size_t n);

    double (*max_abs)(const double* x, std::size_t n);
    double (*min_val)(const double* x, std::size_t n);
};

enum class Backend { auto_select, scalar, avx2, neon };

// Active kernel table. Resolved once on first use.
const Ops& ops();

// Reference table, independent of dispatch.
const Ops& scalar_ops();

// Vector tables; nullptr when the build or the CPU lacks support.
const Ops* avx2_ops();
const Ops* neon_ops();

// Override the active table (tests, reproducibility across machines).
void force_backend(Backend b);

bool cpu_supports_avx2();

}  // namespace mkv::kernels
