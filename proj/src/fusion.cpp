#include "aefuse/fusion.hpp"

#include <cmath>

#include "aefuse/filter.hpp"
#include "aefuse/kernels.hpp"

namespace aefuse {
namespace {

GrayImage clamped(GrayImage img) {
    kernels::clamp01(img.data(), img.size());
    return img;
}

GrayImage average(const GrayImage& a, const GrayImage& b) {
    GrayImage out(a.width(), a.height());
    kernels::mix(a.data(), b.data(), 0.5, out.data(), a.size());
    return out;
}

}  // namespace

GrayImage fuse_average(const ImagePair& pair, double weight) {
    if (!(weight >= 0.0 && weight <= 1.0))
        throw WeightOutOfRange("fuse average: weight " + std::to_string(weight) +
                               " outside [0,1]");
    // a + (1-w)*(b-a): equals w*a + (1-w)*b but is exact at w=1 and a==b
    GrayImage out(pair.a.width(), pair.a.height());
    kernels::mix(pair.b.data(), pair.a.data(), 1.0 - weight, out.data(), out.size());
    return clamped(std::move(out));
}

GrayImage fuse_max_energy(const ImagePair& pair, int window_radius) {
    if (window_radius < 1) throw RangeError("fuse max energy: window radius must be >= 1");
    static const Kernel2D lap(3, 3, {0, 1, 0, 1, -4, 1, 0, 1, 0});
    auto energy = [&](const GrayImage& s) {
        GrayImage r = convolve(s, lap);
        kernels::mul(r.data(), r.data(), r.data(), r.size());
        return box_sum(r, window_radius);
    };
    const GrayImage ea = energy(pair.a);
    const GrayImage eb = energy(pair.b);
    GrayImage out(pair.a.width(), pair.a.height());
    for (size_t i = 0; i < out.size(); ++i)
        out.data()[i] = ea.data()[i] >= eb.data()[i] ? pair.a.data()[i] : pair.b.data()[i];
    return out;
}

int max_pyramid_levels(const GrayImage& img) {
    int d = std::min(img.width(), img.height());
    int levels = 0;
    while (d >= 2) {
        d /= 2;
        ++levels;
    }
    return levels;  // floor(log2(min dimension))
}

Pyramid build_gaussian_pyramid(const GrayImage& img, int levels) {
    Pyramid p;
    p.reserve(levels);
    p.push_back(img);
    for (int k = 1; k < levels; ++k) p.push_back(downsample2(p.back()));
    return p;
}

Pyramid build_laplacian_pyramid(const GrayImage& img, int levels) {
    const Pyramid g = build_gaussian_pyramid(img, levels);
    Pyramid bands;
    bands.reserve(levels);
    for (int k = 0; k + 1 < levels; ++k) {
        const GrayImage up = upsample2(g[k + 1], g[k].width(), g[k].height());
        GrayImage band(g[k].width(), g[k].height());
        kernels::sub(g[k].data(), up.data(), band.data(), band.size());
        bands.push_back(std::move(band));
    }
    bands.push_back(g.back());
    return bands;
}

GrayImage collapse_laplacian(const Pyramid& bands) {
    GrayImage cur = bands.back();
    for (int k = static_cast<int>(bands.size()) - 2; k >= 0; --k) {
        const GrayImage up = upsample2(cur, bands[k].width(), bands[k].height());
        GrayImage next(bands[k].width(), bands[k].height());
        for (size_t i = 0; i < next.size(); ++i)
            next.data()[i] = bands[k].data()[i] + up.data()[i];
        cur = std::move(next);
    }
    return cur;
}

namespace {

void check_levels(const ImagePair& pair, int levels) {
    const int cap = max_pyramid_levels(pair.a);
    if (levels < 2 || levels > cap)
        throw TooManyLevels("pyramid levels " + std::to_string(levels) + " outside [2," +
                            std::to_string(cap) + "] for " + std::to_string(pair.a.width()) + "x" +
                            std::to_string(pair.a.height()));
}

}  // namespace

GrayImage fuse_laplacian_pyramid(const ImagePair& pair, int levels) {
    check_levels(pair, levels);
    const Pyramid la = build_laplacian_pyramid(pair.a, levels);
    const Pyramid lb = build_laplacian_pyramid(pair.b, levels);
    Pyramid fused;
    fused.reserve(levels);
    for (int k = 0; k + 1 < levels; ++k) {
        GrayImage band(la[k].width(), la[k].height());
        for (size_t i = 0; i < band.size(); ++i) {
            const double va = la[k].data()[i], vb = lb[k].data()[i];
            band.data()[i] = std::fabs(va) >= std::fabs(vb) ? va : vb;
        }
        fused.push_back(std::move(band));
    }
    fused.push_back(average(la.back(), lb.back()));
    return clamped(collapse_laplacian(fused));
}

GrayImage fuse_ratio_pyramid(const ImagePair& pair, int levels) {
    check_levels(pair, levels);
    constexpr double eps = 1e-3;
    auto ratios = [&](const GrayImage& img) {
        const Pyramid g = build_gaussian_pyramid(img, levels);
        Pyramid r;
        r.reserve(levels);
        for (int k = 0; k + 1 < levels; ++k) {
            const GrayImage up = upsample2(g[k + 1], g[k].width(), g[k].height());
            GrayImage level(g[k].width(), g[k].height());
            for (size_t i = 0; i < level.size(); ++i)
                level.data()[i] = g[k].data()[i] / (up.data()[i] + eps);
            r.push_back(std::move(level));
        }
        r.push_back(g.back());
        return r;
    };
    const Pyramid ra = ratios(pair.a);
    const Pyramid rb = ratios(pair.b);
    Pyramid fused;
    fused.reserve(levels);
    for (int k = 0; k + 1 < levels; ++k) {
        GrayImage level(ra[k].width(), ra[k].height());
        for (size_t i = 0; i < level.size(); ++i) {
            const double va = ra[k].data()[i], vb = rb[k].data()[i];
            level.data()[i] = std::fabs(va - 1.0) >= std::fabs(vb - 1.0) ? va : vb;
        }
        fused.push_back(std::move(level));
    }
    fused.push_back(average(ra.back(), rb.back()));

    GrayImage cur = fused.back();
    for (int k = levels - 2; k >= 0; --k) {
        const GrayImage up = upsample2(cur, fused[k].width(), fused[k].height());
        GrayImage next(fused[k].width(), fused[k].height());
        for (size_t i = 0; i < next.size(); ++i)
            next.data()[i] = fused[k].data()[i] * (up.data()[i] + eps);
        cur = std::move(next);
    }
    return clamped(std::move(cur));
}

GrayImage fuse_two_scale_saliency(const ImagePair& pair) {
    constexpr double eps = 1e-10;
    const size_t n = pair.a.size();
    const GrayImage base_a = box_blur(pair.a, 15);
    const GrayImage base_b = box_blur(pair.b, 15);
    const GrayImage fine_a = box_blur(pair.a, 3);
    const GrayImage fine_b = box_blur(pair.b, 3);

    GrayImage out = average(base_a, base_b);
    for (size_t i = 0; i < n; ++i) {
        const double det_a = pair.a.data()[i] - base_a.data()[i];
        const double det_b = pair.b.data()[i] - base_b.data()[i];
        const double sal_a = std::fabs(fine_a.data()[i] - base_a.data()[i]);
        const double sal_b = std::fabs(fine_b.data()[i] - base_b.data()[i]);
        // half the stabilizer in each numerator keeps the weights a partition
        // of unity even where both saliencies vanish
        const double den = sal_a + sal_b + eps;
        const double wa = (sal_a + eps / 2) / den;
        const double wb = (sal_b + eps / 2) / den;
        out.data()[i] += wa * det_a + wb * det_b;
    }
    return clamped(std::move(out));
}

void MethodRegistry::add(FusionMethodId id, std::set<Task> tasks, FusionFn fn) {
    for (const MethodEntry& e : entries_)
        if (e.id.name == id.name)
            throw DuplicateMethodName("method '" + id.name + "' already registered");
    entries_.push_back({std::move(id), std::move(tasks), std::move(fn)});
}

const MethodEntry* MethodRegistry::find(const std::string& name) const {
    for (const MethodEntry& e : entries_)
        if (e.id.name == name) return &e;
    return nullptr;
}

std::vector<std::pair<FusionMethodId, GrayImage>> registry_fuse_all(const MethodRegistry& reg,
                                                                    const ImagePair& pair) {
    std::vector<std::pair<FusionMethodId, GrayImage>> out;
    for (const MethodEntry& e : reg.entries()) {
        if (pair.task != Task::Unknown && !e.tasks.contains(pair.task)) continue;
        out.emplace_back(e.id, e.fn(pair));
    }
    if (out.empty())
        throw NoApplicableMethod("pair '" + pair.id + "': no method tagged for task '" +
                                 task_name(pair.task) + "'");
    return out;
}

std::set<Task> all_tasks() {
    return {Task::MultiExposure, Task::InfraredVisible, Task::MultiFocus, Task::Medical,
            Task::Cvs};
}

MethodRegistry default_registry() {
    MethodRegistry reg;
    reg.add({"avg"}, all_tasks(), [](const ImagePair& p) { return fuse_average(p, 0.5); });
    reg.add({"maxsel"}, all_tasks(), [](const ImagePair& p) { return fuse_max_energy(p, 3); });
    reg.add({"lp"}, all_tasks(), [](const ImagePair& p) { return fuse_laplacian_pyramid(p, 4); });
    reg.add({"rp"}, all_tasks(), [](const ImagePair& p) { return fuse_ratio_pyramid(p, 4); });
    reg.add({"tsal"}, all_tasks(), [](const ImagePair& p) { return fuse_two_scale_saliency(p); });
    return reg;
}

}  // namespace aefuse
