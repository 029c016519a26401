// Reference kernels. Plain loops, no reassociation tricks: these define the
// semantics the SIMD variants are tested against.

#include "table.hpp"

namespace femkit::kernels::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void vadd_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

void vmul_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void gemv_scalar(std::size_t m, std::size_t n, const double* a, const double* x, double* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] += dot_scalar(a + i * n, x, n);
}

void gemv_t_scalar(std::size_t m, std::size_t n, const double* a, const double* x, double* y) {
    for (std::size_t i = 0; i < m; ++i) axpy_scalar(x[i], a + i * n, y, n);
}

void ger_scalar(std::size_t m, std::size_t n, double alpha, const double* x, const double* y, double* a) {
    for (std::size_t i = 0; i < m; ++i) axpy_scalar(alpha * x[i], y, a + i * n, n);
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table = {
        dot_scalar, axpy_scalar, scal_scalar, vadd_scalar, vmul_scalar,
        sum_scalar, sumsq_scalar, gemv_scalar, gemv_t_scalar, ger_scalar,
    };
    return table;
}

} // namespace femkit::kernels::detail
