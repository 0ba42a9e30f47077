#include "aefuse/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace aefuse::kernels {
namespace {

using detail::Ops;

Backend pick_auto() {
#if AEFUSE_ARCH_X86
    if (detail::avx2_available()) return Backend::Avx2;
#endif
#if AEFUSE_ARCH_ARM64
    return Backend::Neon;
#endif
    return Backend::Scalar;
}

Backend pick_initial() {
    if (const char* env = std::getenv("AEFUSE_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::Avx2)) return Backend::Avx2;
        if (std::strcmp(env, "neon") == 0 && backend_supported(Backend::Neon)) return Backend::Neon;
    }
    return pick_auto();
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{pick_initial()};
    return b;
}

const Ops& ops_for(Backend b) {
    switch (b) {
#if AEFUSE_ARCH_X86
        case Backend::Avx2:
            return detail::avx2_ops();
#endif
#if AEFUSE_ARCH_ARM64
        case Backend::Neon:
            return detail::neon_ops();
#endif
        default:
            return detail::scalar_ops();
    }
}

const Ops& ops() { return ops_for(current().load(std::memory_order_relaxed)); }

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
        default: return "scalar";
    }
}

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if AEFUSE_ARCH_X86
            return detail::avx2_available();
#else
            return false;
#endif
        case Backend::Neon:
#if AEFUSE_ARCH_ARM64
            return true;
#else
            return false;
#endif
    }
    return false;
}

void force_backend(Backend b) {
    if (backend_supported(b)) current().store(b, std::memory_order_relaxed);
}

void reset_backend() { current().store(pick_initial(), std::memory_order_relaxed); }

void mix(const double* a, const double* b, double w, double* dst, size_t n) {
    ops().mix(a, b, w, dst, n);
}
void mix_map(const double* a, const double* b, const double* w, double* dst, size_t n) {
    ops().mix_map(a, b, w, dst, n);
}
void mul(const double* a, const double* b, double* dst, size_t n) { ops().mul(a, b, dst, n); }
void sub(const double* a, const double* b, double* dst, size_t n) { ops().sub(a, b, dst, n); }
void scale(const double* x, double c, double* dst, size_t n) { ops().scale(x, c, dst, n); }
void clamp01(double* x, size_t n) { ops().clamp01(x, n); }
double sum(const double* x, size_t n) { return ops().sum(x, n); }
double dot(const double* a, const double* b, size_t n) { return ops().dot(a, b, n); }
double sse(const double* a, const double* b, size_t n) { return ops().sse(a, b, n); }
void conv_row(const double* src, double* dst, int w, int h, const double* taps, int radius) {
    ops().conv_row(src, dst, w, h, taps, radius);
}
void conv_col(const double* src, double* dst, int w, int h, const double* taps, int radius) {
    ops().conv_col(src, dst, w, h, taps, radius);
}

}  // namespace aefuse::kernels
