#include "mkv/kernels.hpp"

#include <cmath>

namespace mkv::kernels {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scale_add_scalar(double a, const double* x, double b, const double* y,
                      double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = std::fma(a, x[i], b * y[i]);
}

void triad_scalar(double c1, double* v, double c2, const double* d, double c3,
                  const double* g, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::fma(c3, g[i], std::fma(c2, d[i], c1 * v[i]));
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc = std::fma(x[i], y[i], acc);
    return acc;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double weighted_sum_scalar(const double* w, const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc = std::fma(w[i], x[i], acc);
    return acc;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

double min_val_scalar(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] < m) m = x[i];
    return m;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops table{
        "scalar",         axpy_scalar, scale_add_scalar,    triad_scalar,
        dot_scalar,       sum_scalar,  weighted_sum_scalar, max_abs_scalar,
        min_val_scalar,
    };
    return table;
}

}  // namespace mkv::kernels
