#include "aefuse/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "aefuse/filter.hpp"
#include "aefuse/kernels.hpp"
#include "aefuse/rng.hpp"

namespace aefuse {
namespace {

void normalize_range(GrayImage& img, double lo, double hi) {
    double mn = img.data()[0];
    double mx = mn;
    for (double v : img.pixels()) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    if (mx <= mn) {
        for (double& v : img.pixels()) v = 0.5 * (lo + hi);
        return;
    }
    const double scale = (hi - lo) / (mx - mn);
    for (double& v : img.pixels()) v = lo + (v - mn) * scale;
}

GrayImage gamma_view(const GrayImage& img, double gamma) {
    GrayImage out(img.width(), img.height());
    for (size_t i = 0; i < img.size(); ++i) out.data()[i] = std::pow(img.data()[i], gamma);
    return out;
}

void clamp_unit(GrayImage& img) { kernels::clamp01(img.data(), img.size()); }

}  // namespace

GrayImage make_scene(int width, int height, uint64_t seed) {
    Rng rng(seed);
    GrayImage img(width, height);
    const double gx = 0.25 + 0.5 * rng.u01();
    const double gy = 0.25 + 0.5 * rng.u01();
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img.at(y, x) = gx * x / std::max(1, width - 1) + gy * y / std::max(1, height - 1);

    const int blobs = 3 + static_cast<int>(rng.below(3));
    for (int k = 0; k < blobs; ++k) {
        const double cx = rng.u01() * (width - 1);
        const double cy = rng.u01() * (height - 1);
        const double s = (0.08 + 0.12 * rng.u01()) * std::min(width, height);
        const double amp = rng.uniform(-0.6, 0.6);
        const double inv = -1.0 / (2.0 * s * s);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const double dx = x - cx;
                const double dy = y - cy;
                img.at(y, x) += amp * std::exp((dx * dx + dy * dy) * inv);
            }
    }

    // high-frequency texture patch so the scene has edges at a known scale
    const int side = std::max(4, std::min(width, height) / 3);
    const int px = static_cast<int>(rng.below(std::max(1, width - side)));
    const int py = static_cast<int>(rng.below(std::max(1, height - side)));
    const int cell = 2 + static_cast<int>(rng.below(3));
    for (int y = py; y < std::min(height, py + side); ++y)
        for (int x = px; x < std::min(width, px + side); ++x)
            img.at(y, x) += (((x / cell) + (y / cell)) % 2 == 0) ? 0.22 : -0.22;

    GrayImage noise(width, height);
    for (double& v : noise.pixels()) v = rng.u01() - 0.5;
    noise = gaussian_blur(noise, 1, 0.8);
    for (size_t i = 0; i < img.size(); ++i) img.data()[i] += 0.25 * noise.data()[i];

    normalize_range(img, 0.05, 0.95);
    return img;
}

GrayImage make_pristine(int width, int height, uint64_t seed) {
    return make_scene(width, height, seed * 0x9e3779b97f4a7c15ULL + 1);
}

ImagePair make_task_pair(const std::string& id, Task task, int width, int height, uint64_t seed) {
    GrayImage scene = make_scene(width, height, seed);
    Rng rng(seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    GrayImage a(width, height), b(width, height);

    switch (task) {
        case Task::MultiExposure: {
            a = gamma_view(scene, 2.4);  // underexposed: shadows crushed
            b = gamma_view(scene, 0.4);  // overexposed: highlights compressed
            break;
        }
        case Task::MultiFocus: {
            GrayImage blurred = gaussian_blur(scene, 4, 2.5);
            const int split = width / 2;
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x) {
                    a.at(y, x) = x < split ? blurred.at(y, x) : scene.at(y, x);
                    b.at(y, x) = x < split ? scene.at(y, x) : blurred.at(y, x);
                }
            break;
        }
        case Task::InfraredVisible: {
            a = scene;  // textured "visible" view
            GrayImage smooth = gaussian_blur(scene, 5, 3.0);
            for (size_t i = 0; i < smooth.size(); ++i)
                b.data()[i] = 1.0 - smooth.data()[i];  // smooth inverted "thermal" view
            normalize_range(b, 0.1, 0.9);
            break;
        }
        case Task::Medical: {
            // banded soft-tissue view against a hard-thresholded dense view
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x) {
                    const double s = scene.at(y, x);
                    a.at(y, x) = s * (0.75 + 0.25 * std::sin(0.35 * y + 4.0 * s));
                    b.at(y, x) = s > 0.55 ? 0.85 : 0.12;
                }
            b = gaussian_blur(b, 1, 0.7);
            break;
        }
        case Task::Cvs:
        case Task::Unknown: {
            a = gaussian_blur(scene, 3, 1.8);
            b = scene;
            for (double& v : b.pixels()) v += rng.normal(0.0, 0.04);
            break;
        }
    }
    clamp_unit(a);
    clamp_unit(b);
    return ImagePair(id, std::move(a), std::move(b), task);
}

GrayImage salt_pepper(const GrayImage& img, double density, uint64_t seed) {
    Rng rng(seed);
    GrayImage out = img;
    for (double& v : out.pixels())
        if (rng.u01() < density) v = rng.u01() < 0.5 ? 0.0 : 1.0;
    return out;
}

}  // namespace aefuse
