#include "femkit/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>

#include "table.hpp"

namespace femkit::kernels {
namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if FEMKIT_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* table_for(Backend b) {
#if FEMKIT_HAVE_AVX2
    if (b == Backend::avx2) return &detail::avx2_table();
#endif
    (void)b;
    return &detail::scalar_table();
}

Backend resolve_initial() {
    if (const char* env = std::getenv("FEMKIT_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2)) return Backend::avx2;
        // "auto" or anything unrecognized falls through to detection
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const KernelTable& active() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        Backend b = resolve_initial();
        g_backend.store(b, std::memory_order_relaxed);
        t = table_for(b);
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_available(Backend b) {
    if (b == Backend::scalar) return true;
    return cpu_has_avx2();
}

Backend active_backend() {
    active();
    return g_backend.load(std::memory_order_relaxed);
}

void set_backend(Backend b) {
    if (!backend_available(b)) b = Backend::scalar;
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(table_for(b), std::memory_order_release);
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return active().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    active().axpy(a, x.data(), y.data(), x.size());
}

void scal(double a, std::span<double> x) { active().scal(a, x.data(), x.size()); }

void vadd(std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    active().vadd(x.data(), y.data(), x.size());
}

void vmul(std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    active().vmul(x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double sumsq(std::span<const double> x) { return active().sumsq(x.data(), x.size()); }

void gemv(std::size_t m, std::size_t n, const double* a, const double* x, double* y) {
    active().gemv(m, n, a, x, y);
}

void gemv_t(std::size_t m, std::size_t n, const double* a, const double* x, double* y) {
    active().gemv_t(m, n, a, x, y);
}

void ger(std::size_t m, std::size_t n, double alpha, const double* x, const double* y, double* a) {
    active().ger(m, n, alpha, x, y, a);
}

} // namespace femkit::kernels
