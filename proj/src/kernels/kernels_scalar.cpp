#include <algorithm>

#include "kernels_impl.hpp"

// Reference implementations. These define the semantics every SIMD variant
// must reproduce bit for bit.

namespace aefuse::kernels::detail {
namespace {

void k_mix(const double* a, const double* b, double w, double* dst, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = b[i] + w * (a[i] - b[i]);
}

void k_mix_map(const double* a, const double* b, const double* w, double* dst, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = b[i] + w[i] * (a[i] - b[i]);
}

void k_mul(const double* a, const double* b, double* dst, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void k_sub(const double* a, const double* b, double* dst, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void k_scale(const double* x, double c, double* dst, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = c * x[i];
}

void k_clamp01(double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] = std::min(1.0, std::max(0.0, x[i]));
}

double k_sum(const double* x, size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        s0 += x[i];
        s1 += x[i + 1];
        s2 += x[i + 2];
        s3 += x[i + 3];
    }
    double lane[4] = {s0, s1, s2, s3};
    for (size_t i = n4; i < n; ++i) lane[i - n4] += x[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double k_dot(const double* a, const double* b, size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double lane[4] = {s0, s1, s2, s3};
    for (size_t i = n4; i < n; ++i) lane[i - n4] += a[i] * b[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double k_sse(const double* a, const double* b, size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        double d0 = a[i] - b[i];
        double d1 = a[i + 1] - b[i + 1];
        double d2 = a[i + 2] - b[i + 2];
        double d3 = a[i + 3] - b[i + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    double lane[4] = {s0, s1, s2, s3};
    for (size_t i = n4; i < n; ++i) {
        double d = a[i] - b[i];
        lane[i - n4] += d * d;
    }
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void k_conv_row(const double* src, double* dst, int w, int h, const double* taps, int radius) {
    for (int y = 0; y < h; ++y) {
        const double* s = src + static_cast<size_t>(y) * w;
        double* d = dst + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += taps[t + radius] * s[clampi(x + t, 0, w - 1)];
            d[x] = acc;
        }
    }
}

void k_conv_col(const double* src, double* dst, int w, int h, const double* taps, int radius) {
    for (int y = 0; y < h; ++y) {
        double* d = dst + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += taps[t + radius] * src[static_cast<size_t>(clampi(y + t, 0, h - 1)) * w + x];
            d[x] = acc;
        }
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {k_mix, k_mix_map, k_mul,      k_sub,      k_scale, k_clamp01,
                            k_sum, k_dot,     k_sse,      k_conv_row, k_conv_col};
    return ops;
}

}  // namespace aefuse::kernels::detail
