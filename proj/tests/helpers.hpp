#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "aefuse/image.hpp"
#include "aefuse/rng.hpp"

// Shared fixtures plus independent brute-force references the fast paths are
// checked against.
namespace testutil {

using aefuse::GrayImage;

inline GrayImage mk(int w, int h, std::initializer_list<double> v) {
    return GrayImage(w, h, std::vector<double>(v));
}

inline GrayImage constant(int w, int h, double v) { return GrayImage(w, h, v); }

template <class F>
inline GrayImage gen(int w, int h, F f) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(y, x) = f(x, y);
    return img;
}

inline double mean(const GrayImage& img) {
    double s = 0.0;
    for (size_t i = 0; i < img.size(); ++i) s += img.data()[i];
    return s / static_cast<double>(img.size());
}

inline GrayImage ramp_x(int w, int h) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(y, x) = w > 1 ? double(x) / (w - 1) : 0.0;
    return img;
}

inline GrayImage checkerboard(int w, int h, int cell = 1) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(y, x) = ((x / cell + y / cell) % 2 == 0) ? 0.0 : 1.0;
    return img;
}

inline GrayImage random_image(int w, int h, uint64_t seed) {
    aefuse::Rng rng(seed);
    GrayImage img(w, h);
    for (double& v : img.pixels()) v = rng.u01();
    return img;
}

inline GrayImage add_noise(const GrayImage& img, double sigma, uint64_t seed) {
    aefuse::Rng rng(seed);
    GrayImage out = img;
    for (double& v : out.pixels()) {
        v += rng.normal(0.0, sigma);
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
    return out;
}

inline double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline bool bitwise_equal(const GrayImage& a, const GrayImage& b) {
    if (!a.same_shape(b)) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a.data()[i] != b.data()[i]) return false;
    return true;
}

// --- brute-force references ---

inline int quant8(double v) {
    long q = std::lround(v * 255.0);
    if (q < 0) q = 0;
    if (q > 255) q = 255;
    return static_cast<int>(q);
}

inline double ref_entropy(const GrayImage& img) {
    std::array<uint64_t, 256> hist{};
    for (size_t i = 0; i < img.size(); ++i) hist[quant8(img.data()[i])]++;
    double h = 0.0;
    for (int k = 0; k < 256; ++k) {
        if (hist[k] == 0) continue;
        const double p = double(hist[k]) / double(img.size());
        h -= p * std::log2(p);
    }
    return h;
}

inline double ref_mutual_information(const GrayImage& a, const GrayImage& b) {
    std::array<uint64_t, 256> ha{}, hb{};
    std::vector<uint64_t> joint(65536, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        const int qa = quant8(a.data()[i]);
        const int qb = quant8(b.data()[i]);
        ha[qa]++;
        hb[qb]++;
        joint[qa * 256 + qb]++;
    }
    const double n = double(a.size());
    auto ent = [&](auto& hist, size_t len) {
        double h = 0.0;
        for (size_t k = 0; k < len; ++k)
            if (hist[k]) {
                const double p = double(hist[k]) / n;
                h -= p * std::log2(p);
            }
        return h;
    };
    return ent(ha, 256) + ent(hb, 256) - ent(joint, 65536);
}

inline double ref_avg_gradient(const GrayImage& img) {
    const int w = img.width(), h = img.height();
    double acc = 0.0;
    for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x + 1 < w; ++x) {
            const double dx = (img.at(y, x + 1) - img.at(y, x)) * 255.0;
            const double dy = (img.at(y + 1, x) - img.at(y, x)) * 255.0;
            acc += std::sqrt((dx * dx + dy * dy) / 2.0);
        }
    return acc / (double(w - 1) * double(h - 1));
}

inline double ref_psnr(const GrayImage& p, const GrayImage& r) {
    double sse = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double d = (p.data()[i] - r.data()[i]) * 255.0;
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / (sse / double(p.size())));
}

// dense replicate-border correlation, no separable shortcut
inline GrayImage ref_convolve(const GrayImage& img, const std::vector<double>& k2d, int kw,
                              int kh) {
    const int w = img.width(), h = img.height();
    const int rx = kw / 2, ry = kh / 2;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < kh; ++ky)
                for (int kx = 0; kx < kw; ++kx) {
                    int sy = y + ky - ry;
                    int sx = x + kx - rx;
                    sy = sy < 0 ? 0 : (sy >= h ? h - 1 : sy);
                    sx = sx < 0 ? 0 : (sx >= w ? w - 1 : sx);
                    acc += k2d[ky * kw + kx] * img.at(sy, sx);
                }
            out.at(y, x) = acc;
        }
    return out;
}

// Scratch directory per test, wiped on construction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / ("aefuse_test_" + name)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::filesystem::path operator/(const std::string& leaf) const { return path / leaf; }
};

}  // namespace testutil
