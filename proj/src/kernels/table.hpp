#pragma once

#include <cstddef>

namespace femkit::kernels::detail {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    void (*vadd)(const double*, double*, std::size_t);
    void (*vmul)(const double*, double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    void (*gemv)(std::size_t, std::size_t, const double*, const double*, double*);
    void (*gemv_t)(std::size_t, std::size_t, const double*, const double*, double*);
    void (*ger)(std::size_t, std::size_t, double, const double*, const double*, double*);
};

const KernelTable& scalar_table();
#if FEMKIT_HAVE_AVX2
const KernelTable& avx2_table();
#endif

} // namespace femkit::kernels::detail
