#pragma once

#include <cstddef>

// ============================================================
// Platform detection
// ============================================================

#if defined(__x86_64__) || defined(_M_X64)
#define AEFUSE_ARCH_X86 1
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define AEFUSE_ARCH_ARM64 1
#endif

// Per-backend entry points. A backend TU defines the full set or, when the
// target architecture does not match, nothing at all.
namespace aefuse::kernels::detail {

struct Ops {
    void (*mix)(const double*, const double*, double, double*, size_t);
    void (*mix_map)(const double*, const double*, const double*, double*, size_t);
    void (*mul)(const double*, const double*, double*, size_t);
    void (*sub)(const double*, const double*, double*, size_t);
    void (*scale)(const double*, double, double*, size_t);
    void (*clamp01)(double*, size_t);
    double (*sum)(const double*, size_t);
    double (*dot)(const double*, const double*, size_t);
    double (*sse)(const double*, const double*, size_t);
    void (*conv_row)(const double*, double*, int, int, const double*, int);
    void (*conv_col)(const double*, double*, int, int, const double*, int);
};

const Ops& scalar_ops();

#if AEFUSE_ARCH_X86
bool avx2_available();
const Ops& avx2_ops();
#endif

#if AEFUSE_ARCH_ARM64
const Ops& neon_ops();
#endif

}  // namespace aefuse::kernels::detail
