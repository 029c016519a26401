#pragma once

// Double-precision vector kernels used by the model, encoder and similarity
// code. A scalar reference implementation always exists; an AVX2+FMA variant
// is selected at runtime when the CPU supports it. The two are equivalence-
// tested, not bit-identical: SIMD reductions reassociate sums.

#include <cstddef>
#include <span>

namespace femkit::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);

// True if this build carries the backend and the CPU can run it.
bool backend_available(Backend b);

// Backend in effect. Resolution order: explicit set_backend() call,
// FEMKIT_KERNELS env var (scalar|avx2|auto), then best available.
Backend active_backend();
void set_backend(Backend b);

// Dot product  x . y
double dot(std::span<const double> x, std::span<const double> y);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

// x *= a
void scal(double a, std::span<double> x);

// y += x
void vadd(std::span<const double> x, std::span<double> y);

// y *= x (elementwise)
void vmul(std::span<const double> x, std::span<double> y);

double sum(std::span<const double> x);

// Sum of squares, i.e. squared L2 norm.
double sumsq(std::span<const double> x);

// y += A x, with A row-major m x n, x of size n, y of size m.
void gemv(std::size_t m, std::size_t n, const double* a, const double* x, double* y);

// y += A^T x, with A row-major m x n, x of size m, y of size n.
void gemv_t(std::size_t m, std::size_t n, const double* a, const double* x, double* y);

// A += alpha * x y^T, with A row-major m x n, x of size m, y of size n.
void ger(std::size_t m, std::size_t n, double alpha, const double* x, const double* y, double* a);

} // namespace femkit::kernels
