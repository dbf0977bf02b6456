// AVX2 + FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma on x86-64 only; dispatch guards execution behind a runtime
// CPU check.

#include "mkv/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace mkv::kernels {

namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, vx, vy));
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scale_add_avx2(double a, const double* x, double b, const double* y,
                    double* z, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(z + i, _mm256_fmadd_pd(va, vx, _mm256_mul_pd(vb, vy)));
    }
    for (; i < n; ++i) z[i] = std::fma(a, x[i], b * y[i]);
}

void triad_avx2(double c1, double* v, double c2, const double* d, double c3,
                const double* g, std::size_t n) {
    const __m256d v1 = _mm256_set1_pd(c1);
    const __m256d v2 = _mm256_set1_pd(c2);
    const __m256d v3 = _mm256_set1_pd(c3);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vv = _mm256_loadu_pd(v + i);
        const __m256d vd = _mm256_loadu_pd(d + i);
        const __m256d vg = _mm256_loadu_pd(g + i);
        const __m256d inner = _mm256_fmadd_pd(v2, vd, _mm256_mul_pd(v1, vv));
        _mm256_storeu_pd(v + i, _mm256_fmadd_pd(v3, vg, inner));
    }
    for (; i < n; ++i)
        v[i] = std::fma(c3, g[i], std::fma(c2, d[i], c1 * v[i]));
}

// Lane accumulators merged lane0..lane3, then the tail appended; the order
// is fixed, so results are deterministic for a given n.
double horizontal(__m256d acc) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    return ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    }
    double r = horizontal(acc);
    for (; i < n; ++i) r = std::fma(x[i], y[i], r);
    return r;
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = horizontal(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double weighted_sum_avx2(const double* w, const double* x, std::size_t n) {
    return dot_avx2(w, x, n);
}

double max_abs_avx2(const double* x, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_max_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] > m) m = lanes[k];
    for (; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

double min_val_avx2(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    if (n < 4) {
        double m = x[0];
        for (std::size_t i = 1; i < n; ++i)
            if (x[i] < m) m = x[i];
        return m;
    }
    __m256d acc = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] < m) m = lanes[k];
    for (; i < n; ++i)
        if (x[i] < m) m = x[i];
    return m;
}

}  // namespace

const Ops* avx2_ops_table() {
    static const Ops table{
        "avx2",         axpy_avx2, scale_add_avx2,    triad_avx2,
        dot_avx2,       sum_avx2,  weighted_sum_avx2, max_abs_avx2,
        min_val_avx2,
    };
    return &table;
}

}  // namespace mkv::kernels

#else

namespace mkv::kernels {
const Ops* avx2_ops_table() { return nullptr; }
}  // namespace mkv::kernels

#endif
