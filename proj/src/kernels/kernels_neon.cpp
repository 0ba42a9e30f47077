#include "kernels_impl.hpp"

#if AEFUSE_ARCH_ARM64

#include <arm_neon.h>

// NEON variants (2 lanes of f64). Reductions keep the reference's 4-lane
// blocked order by carrying two accumulator pairs.

namespace aefuse::kernels::detail {
namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void k_mix(const double* a, const double* b, double w, double* dst, size_t n) {
    const float64x2_t vw = vdupq_n_f64(w);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t va = vld1q_f64(a + i);
        float64x2_t vb = vld1q_f64(b + i);
        vst1q_f64(dst + i, vaddq_f64(vb, vmulq_f64(vw, vsubq_f64(va, vb))));
    }
    for (; i < n; ++i) dst[i] = b[i] + w * (a[i] - b[i]);
}

void k_mix_map(const double* a, const double* b, const double* w, double* dst, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t va = vld1q_f64(a + i);
        float64x2_t vb = vld1q_f64(b + i);
        float64x2_t vw = vld1q_f64(w + i);
        vst1q_f64(dst + i, vaddq_f64(vb, vmulq_f64(vw, vsubq_f64(va, vb))));
    }
    for (; i < n; ++i) dst[i] = b[i] + w[i] * (a[i] - b[i]);
}

void k_mul(const double* a, const double* b, double* dst, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void k_sub(const double* a, const double* b, double* dst, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void k_scale(const double* x, double c, double* dst, size_t n) {
    const float64x2_t vc = vdupq_n_f64(c);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vc, vld1q_f64(x + i)));
    for (; i < n; ++i) dst[i] = c * x[i];
}

void k_clamp01(double* x, size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(x + i, vminq_f64(vmaxq_f64(vld1q_f64(x + i), zero), one));
    for (; i < n; ++i) x[i] = x[i] < 0.0 ? 0.0 : (x[i] > 1.0 ? 1.0 : x[i]);
}

double k_sum(const double* x, size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        acc01 = vaddq_f64(acc01, vld1q_f64(x + i));
        acc23 = vaddq_f64(acc23, vld1q_f64(x + i + 2));
    }
    double lane[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                      vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (size_t i = n4; i < n; ++i) lane[i - n4] += x[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double k_dot(const double* a, const double* b, size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double lane[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                      vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (size_t i = n4; i < n; ++i) lane[i - n4] += a[i] * b[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double k_sse(const double* a, const double* b, size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc01 = vaddq_f64(acc01, vmulq_f64(d0, d0));
        acc23 = vaddq_f64(acc23, vmulq_f64(d1, d1));
    }
    double lane[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                      vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (size_t i = n4; i < n; ++i) {
        double d = a[i] - b[i];
        lane[i - n4] += d * d;
    }
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
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
        for (; x + 1 <= w - 1 - radius; x += 2) {
            float64x2_t acc = vdupq_n_f64(0.0);
            const double* base = s + x - radius;
            for (int t = 0; t < ntaps; ++t)
                acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(taps[t]), vld1q_f64(base + t)));
            vst1q_f64(d + x, acc);
        }
        for (; x < w; ++x) d[x] = conv_px_row(s, w, x, taps, radius);
    }
}

void k_conv_col(const double* src, double* dst, int w, int h, const double* taps, int radius) {
    const int ntaps = 2 * radius + 1;
    for (int y = 0; y < h; ++y) {
        double* d = dst + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x + 2 <= w; x += 2) {
            float64x2_t acc = vdupq_n_f64(0.0);
            for (int t = 0; t < ntaps; ++t) {
                const double* s = src + static_cast<size_t>(clampi(y + t - radius, 0, h - 1)) * w;
                acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(taps[t]), vld1q_f64(s + x)));
            }
            vst1q_f64(d + x, acc);
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

const Ops& neon_ops() {
    static const Ops ops = {k_mix, k_mix_map, k_mul,      k_sub,      k_scale, k_clamp01,
                            k_sum, k_dot,     k_sse,      k_conv_row, k_conv_col};
    return ops;
}

}  // namespace aefuse::kernels::detail

#endif  // AEFUSE_ARCH_ARM64
