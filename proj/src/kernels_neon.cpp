// NEON kernel variants for aarch64. The 128-bit lanes hold two doubles;
// the merge order of lane accumulators is fixed, matching the AVX2 layout
// of the equivalence contract.

#include "mkv/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace mkv::kernels {

namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scale_add_neon(double a, const double* x, double b, const double* y,
                    double* z, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t by = vmulq_f64(vb, vld1q_f64(y + i));
        vst1q_f64(z + i, vfmaq_f64(by, va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) z[i] = std::fma(a, x[i], b * y[i]);
}

void triad_neon(double c1, double* v, double c2, const double* d, double c3,
                const double* g, std::size_t n) {
    const float64x2_t v1 = vdupq_n_f64(c1);
    const float64x2_t v2 = vdupq_n_f64(c2);
    const float64x2_t v3 = vdupq_n_f64(c3);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vv = vmulq_f64(v1, vld1q_f64(v + i));
        const float64x2_t inner = vfmaq_f64(vv, v2, vld1q_f64(d + i));
        vst1q_f64(v + i, vfmaq_f64(inner, v3, vld1q_f64(g + i)));
    }
    for (; i < n; ++i)
        v[i] = std::fma(c3, g[i], std::fma(c2, d[i], c1 * v[i]));
}

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) r = std::fma(x[i], y[i], r);
    return r;
}

double sum_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) r += x[i];
    return r;
}

double weighted_sum_neon(const double* w, const double* x, std::size_t n) {
    return dot_neon(w, x, n);
}

double max_abs_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
    double m = vgetq_lane_f64(acc, 0);
    if (vgetq_lane_f64(acc, 1) > m) m = vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

double min_val_neon(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    double m = x[0];
    std::size_t i = 1;
    if (n >= 3) {
        float64x2_t acc = vld1q_f64(x);
        for (i = 2; i + 2 <= n; i += 2) acc = vminq_f64(acc, vld1q_f64(x + i));
        m = vgetq_lane_f64(acc, 0);
        if (vgetq_lane_f64(acc, 1) < m) m = vgetq_lane_f64(acc, 1);
    }
    for (; i < n; ++i)
        if (x[i] < m) m = x[i];
    return m;
}

}  // namespace

const Ops* neon_ops_table() {
    static const Ops table{
        "neon",         axpy_neon, scale_add_neon,    triad_neon,
        dot_neon,       sum_neon,  weighted_sum_neon, max_abs_neon,
        min_val_neon,
    };
    return &table;
}

}  // namespace mkv::kernels

#else

namespace mkv::kernels {
const Ops* neon_ops_table() { return nullptr; }
}  // namespace mkv::kernels

#endif
