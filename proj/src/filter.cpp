#include "aefuse/filter.hpp"

#include <cmath>

#include "aefuse/kernels.hpp"

namespace aefuse {
namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

Kernel2D::Kernel2D(int kw_, int kh_, std::vector<double> w_) : kw(kw_), kh(kh_), w(std::move(w_)) {
    if (kw < 1 || kh < 1 || kw % 2 == 0 || kh % 2 == 0)
        throw EvenKernel("kernel sides must be odd and positive, got " + std::to_string(kw) + "x" +
                         std::to_string(kh));
    if (w.size() != static_cast<size_t>(kw) * kh)
        throw DimensionMismatch("kernel weight count does not match dimensions");
}

GrayImage convolve(const GrayImage& img, const Kernel2D& k) {
    if (img.empty()) throw DimensionMismatch("convolve: empty image");
    const int w = img.width(), h = img.height();
    const int rx = k.kw / 2, ry = k.kh / 2;
    if (k.kh == 1) {
        GrayImage out(w, h);
        kernels::conv_row(img.data(), out.data(), w, h, k.w.data(), rx);
        return out;
    }
    if (k.kw == 1) {
        GrayImage out(w, h);
        kernels::conv_col(img.data(), out.data(), w, h, k.w.data(), ry);
        return out;
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -ry; dy <= ry; ++dy) {
                const double* srow = img.row(clampi(y + dy, 0, h - 1));
                const double* krow = k.w.data() + static_cast<size_t>(dy + ry) * k.kw;
                for (int dx = -rx; dx <= rx; ++dx)
                    acc += krow[dx + rx] * srow[clampi(x + dx, 0, w - 1)];
            }
            out.at(y, x) = acc;
        }
    }
    return out;
}

std::vector<double> gaussian_taps(int radius, double sigma) {
    if (radius < 1) throw RangeError("gaussian taps: radius must be >= 1");
    if (!(sigma > 0.0)) throw InvalidSigma("gaussian taps: sigma must be > 0");
    std::vector<double> t(2 * radius + 1);
    double s = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        double v = std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
        t[k + radius] = v;
        s += v;
    }
    for (double& v : t) v /= s;
    return t;
}

Kernel2D gaussian_kernel(int radius, double sigma) {
    const std::vector<double> t = gaussian_taps(radius, sigma);
    const int n = 2 * radius + 1;
    std::vector<double> w(static_cast<size_t>(n) * n);
    double s = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double v = t[y] * t[x];
            w[static_cast<size_t>(y) * n + x] = v;
            s += v;
        }
    for (double& v : w) v /= s;
    return Kernel2D(n, n, std::move(w));
}

GrayImage separable_blur(const GrayImage& img, const std::vector<double>& taps) {
    if (taps.empty() || taps.size() % 2 == 0)
        throw EvenKernel("separable blur: tap count must be odd");
    const int radius = static_cast<int>(taps.size() / 2);
    GrayImage tmp(img.width(), img.height());
    GrayImage out(img.width(), img.height());
    kernels::conv_row(img.data(), tmp.data(), img.width(), img.height(), taps.data(), radius);
    kernels::conv_col(tmp.data(), out.data(), img.width(), img.height(), taps.data(), radius);
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, int radius, double sigma) {
    return separable_blur(img, gaussian_taps(radius, sigma));
}

GrayImage box_blur(const GrayImage& img, int radius) {
    if (radius < 1) throw RangeError("box blur: radius must be >= 1");
    std::vector<double> taps(2 * radius + 1, 1.0 / (2 * radius + 1));
    return separable_blur(img, taps);
}

GrayImage box_sum(const GrayImage& img, int radius) {
    if (radius < 1) throw RangeError("box sum: radius must be >= 1");
    std::vector<double> taps(2 * radius + 1, 1.0);
    return separable_blur(img, taps);
}

GrayImage downsample2(const GrayImage& img) {
    const GrayImage low = gaussian_blur(img, 2, 1.0);
    const int ow = (img.width() + 1) / 2, oh = (img.height() + 1) / 2;
    GrayImage out(ow, oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) out.at(y, x) = low.at(2 * y, 2 * x);
    return out;
}

GrayImage upsample2(const GrayImage& img, int target_w, int target_h) {
    const int w = img.width(), h = img.height();
    if (target_w != 2 * w && target_w != 2 * w - 1)
        throw DimensionMismatch("upsample2: target width " + std::to_string(target_w) +
                                " not in {" + std::to_string(2 * w - 1) + "," +
                                std::to_string(2 * w) + "}");
    if (target_h != 2 * h && target_h != 2 * h - 1)
        throw DimensionMismatch("upsample2: target height " + std::to_string(target_h) +
                                " not in {" + std::to_string(2 * h - 1) + "," +
                                std::to_string(2 * h) + "}");

    const std::vector<double> g = gaussian_taps(2, 1.0);
    // Phase weights over the zero-insert grid: even outputs see taps
    // {-2,0,2}, odd outputs taps {-1,1}; each phase renormalized.
    const double de = g[0] + g[2] + g[4];
    const double we0 = g[0] / de, we1 = g[2] / de, we2 = g[4] / de;
    const double wo = g[1] / (g[1] + g[3]);

    GrayImage tmp(w, target_h);
    for (int y = 0; y < target_h; ++y) {
        const int sy = y / 2;
        if (y % 2 == 0) {
            const double* r0 = img.row(clampi(sy - 1, 0, h - 1));
            const double* r1 = img.row(sy);
            const double* r2 = img.row(clampi(sy + 1, 0, h - 1));
            for (int x = 0; x < w; ++x)
                tmp.at(y, x) = we0 * r0[x] + we1 * r1[x] + we2 * r2[x];
        } else {
            const double* r0 = img.row(sy);
            const double* r1 = img.row(clampi(sy + 1, 0, h - 1));
            for (int x = 0; x < w; ++x)
                tmp.at(y, x) = wo * r0[x] + (1.0 - wo) * r1[x];
        }
    }
    GrayImage out(target_w, target_h);
    for (int y = 0; y < target_h; ++y) {
        const double* s = tmp.row(y);
        double* d = out.row(y);
        for (int x = 0; x < target_w; ++x) {
            const int sx = x / 2;
            if (x % 2 == 0) {
                d[x] = we0 * s[clampi(sx - 1, 0, w - 1)] + we1 * s[sx] +
                       we2 * s[clampi(sx + 1, 0, w - 1)];
            } else {
                d[x] = wo * s[sx] + (1.0 - wo) * s[clampi(sx + 1, 0, w - 1)];
            }
        }
    }
    return out;
}

std::array<uint64_t, 256> histogram256(const GrayImage& img) {
    std::array<uint64_t, 256> h{};
    const double* d = img.data();
    for (size_t i = 0; i < img.size(); ++i) {
        long v = std::lround(d[i] * 255.0);
        if (v < 0) v = 0;
        if (v > 255) v = 255;
        ++h[static_cast<size_t>(v)];
    }
    return h;
}

}  // namespace aefuse
