#include "kernels_impl.hpp"

#if AEFUSE_ARCH_X86

#include <immintrin.h>

// AVX2 variants. Per-lane operation chains mirror the scalar reference
// exactly (no fma), so outputs are bit-identical. Reductions map the four
// vector lanes onto the reference's four blocked accumulators.

namespace aefuse::kernels::detail {
namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void k_mix(const double* a, const double* b, double w, double* dst, size_t n) {
    const __m256d vw = _mm256_set1_pd(w);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d r = _mm256_add_pd(vb, _mm256_mul_pd(vw, _mm256_sub_pd(va, vb)));
        _mm256_storeu_pd(dst + i, r);
    }
    for (; i < n; ++i) dst[i] = b[i] + w * (a[i] - b[i]);
}

void k_mix_map(const double* a, const double* b, const double* w, double* dst, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d vw = _mm256_loadu_pd(w + i);
        __m256d r = _mm256_add_pd(vb, _mm256_mul_pd(vw, _mm256_sub_pd(va, vb)));
        _mm256_storeu_pd(dst + i, r);
    }
    for (; i < n; ++i) dst[i] = b[i] + w[i] * (a[i] - b[i]);
}

void k_mul(const double* a, const double* b, double* dst, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void k_sub(const double* a, const double* b, double* dst, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void k_scale(const double* x, double c, double* dst, size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) dst[i] = c * x[i];
}

void k_clamp01(double* x, size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        v = _mm256_min_pd(_mm256_max_pd(v, zero), one);
        _mm256_storeu_pd(x + i, v);
    }
    for (; i < n; ++i) x[i] = x[i] < 0.0 ? 0.0 : (x[i] > 1.0 ? 1.0 : x[i]);
}

inline double hsum_blocked(__m256d acc, const double* x, size_t n4, size_t n,
                           const double* y, int kind) {
    // kind 0: tail of sum, 1: dot, 2: sse
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (size_t i = n4; i < n; ++i) {
        if (kind == 0) {
            lane[i - n4] += x[i];
        } else if (kind == 1) {
            lane[i - n4] += x[i] * y[i];
        } else {
            double d = x[i] - y[i];
            lane[i - n4] += d * d;
        }
    }
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double k_sum(const double* x, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    return hsum_blocked(acc, x, n4, n, nullptr, 0);
}

double k_dot(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    return hsum_blocked(acc, a, n4, n, b, 1);
}

double k_sse(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    return hsum_blocked(acc, a, n4, n, b, 2);
}

inline double conv_px_row(const double* s, int w, int x, const double* taps, int radius) {
    double acc = 0.0;
    for (int t = -radius; t <= radius; ++t)
        acc += taps[t + radius] * s[clampi(x + t, 0, w - 1)];
    return acc;
}

void k_conv_row(const double* src, double* dst, int w, int h, const double* taps, int radius) {
    const int ntaps = 2 * radius + 1;
    for (int y = 0; y < h; ++y) {
        const double* s = src + static_cast<size_t>(y) * w;
        double* d = dst + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x < radius && x < w; ++x) d[x] = conv_px_row(s, w, x, taps, radius);
        for (; x + 3 <= w - 1 - radius; x += 4) {
            __m256d acc = _mm256_setzero_pd();
            const double* base = s + x - radius;
            for (int t = 0; t < ntaps; ++t)
                acc = _mm256_add_pd(acc,
                                    _mm256_mul_pd(_mm256_set1_pd(taps[t]), _mm256_loadu_pd(base + t)));
            _mm256_storeu_pd(d + x, acc);
        }
        for (; x < w; ++x) d[x] = conv_px_row(s, w, x, taps, radius);
    }
}

void k_conv_col(const double* src, double* dst, int w, int h, const double* taps, int radius) {
    const int ntaps = 2 * radius + 1;
    for (int y = 0; y < h; ++y) {
        double* d = dst + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x + 4 <= w; x += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int t = 0; t < ntaps; ++t) {
                const double* s = src + static_cast<size_t>(clampi(y + t - radius, 0, h - 1)) * w;
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(taps[t]), _mm256_loadu_pd(s + x)));
            }
            _mm256_storeu_pd(d + x, acc);
        }
        for (; x < w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < ntaps; ++t)
                acc += taps[t] * src[static_cast<size_t>(clampi(y + t - radius, 0, h - 1)) * w + x];
            d[x] = acc;
        }
    }
}

}  // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2"); }

const Ops& avx2_ops() {
    static const Ops ops = {k_mix, k_mix_map, k_mul,      k_sub,      k_scale, k_clamp01,
                            k_sum, k_dot,     k_sse,      k_conv_row, k_conv_col};
    return ops;
}

}  // namespace aefuse::kernels::detail

#endif  // AEFUSE_ARCH_X86
