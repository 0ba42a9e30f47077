#include "aefuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "aefuse/filter.hpp"
#include "aefuse/kernels.hpp"

namespace aefuse {
namespace {

GrayImage to255(const GrayImage& img) {
    GrayImage out(img.width(), img.height());
    kernels::scale(img.data(), 255.0, out.data(), img.size());
    return out;
}

double histogram_entropy(const std::array<uint64_t, 256>& h, uint64_t n) {
    double en = 0.0;
    for (uint64_t c : h) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(n);
        en -= p * std::log2(p);
    }
    return en;
}

inline int quant8(double v) {
    long q = std::lround(v * 255.0);
    return q < 0 ? 0 : (q > 255 ? 255 : static_cast<int>(q));
}

void require_same_shape(const GrayImage& p, const GrayImage& r, const char* what) {
    if (!p.same_shape(r))
        throw DimensionMismatch(std::string(what) + ": image dimensions differ");
}

}  // namespace

const char* metric_name(MetricId m) {
    switch (m) {
        case MetricId::EN: return "EN";
        case MetricId::AG: return "AG";
        case MetricId::SSIM: return "SSIM";
        case MetricId::VIF: return "VIF";
        case MetricId::NIQE: return "NIQE";
        case MetricId::PSNR: return "PSNR";
        case MetricId::MI: return "MI";
    }
    return "?";
}

double entropy(const GrayImage& img) {
    if (img.empty()) throw TooSmall("entropy: empty image");
    return histogram_entropy(histogram256(img), img.size());
}

double avg_gradient(const GrayImage& img) {
    const int w = img.width(), h = img.height();
    if (w < 2 || h < 2) throw TooSmall("avg gradient: both dimensions must be >= 2");
    const GrayImage s = to255(img);
    double acc = 0.0;
    for (int y = 0; y + 1 < h; ++y) {
        const double* r0 = s.row(y);
        const double* r1 = s.row(y + 1);
        for (int x = 0; x + 1 < w; ++x) {
            double dx = r0[x + 1] - r0[x];
            double dy = r1[x] - r0[x];
            acc += std::sqrt((dx * dx + dy * dy) / 2.0);
        }
    }
    return acc / (static_cast<double>(h - 1) * (w - 1));
}

double ssim(const GrayImage& p, const GrayImage& r) {
    require_same_shape(p, r, "ssim");
    if (p.width() < 11 || p.height() < 11)
        throw TooSmall("ssim: both dimensions must be >= 11");
    constexpr double C1 = (0.01 * 255) * (0.01 * 255);
    constexpr double C2 = (0.03 * 255) * (0.03 * 255);
    const std::vector<double> taps = gaussian_taps(5, 1.5);
    const size_t n = p.size();

    const GrayImage ap = to255(p), ar = to255(r);
    const GrayImage mu_p = separable_blur(ap, taps);
    const GrayImage mu_r = separable_blur(ar, taps);

    GrayImage buf(p.width(), p.height());
    kernels::mul(ap.data(), ap.data(), buf.data(), n);
    const GrayImage m_pp = separable_blur(buf, taps);
    kernels::mul(ar.data(), ar.data(), buf.data(), n);
    const GrayImage m_rr = separable_blur(buf, taps);
    kernels::mul(ap.data(), ar.data(), buf.data(), n);
    const GrayImage m_pr = separable_blur(buf, taps);

    GrayImage map(p.width(), p.height());
    for (size_t i = 0; i < n; ++i) {
        const double up = mu_p.data()[i], ur = mu_r.data()[i];
        const double upr = up * ur;
        const double sp = m_pp.data()[i] - up * up;
        const double sr = m_rr.data()[i] - ur * ur;
        const double spr = m_pr.data()[i] - upr;
        const double num = (2.0 * upr + C1) * (2.0 * spr + C2);
        const double den = (up * up + ur * ur + C1) * (sp + sr + C2);
        map.data()[i] = num / den;
    }
    return kernels::sum(map.data(), n) / static_cast<double>(n);
}

double psnr(const GrayImage& p, const GrayImage& r) {
    require_same_shape(p, r, "psnr");
    if (p.empty()) throw TooSmall("psnr: empty image");
    const GrayImage ap = to255(p), ar = to255(r);
    const double mse = kernels::sse(ap.data(), ar.data(), p.size()) / static_cast<double>(p.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double mutual_information(const GrayImage& a, const GrayImage& b) {
    require_same_shape(a, b, "mutual information");
    if (a.empty()) throw TooSmall("mutual information: empty image");
    const size_t n = a.size();
    const double ha = histogram_entropy(histogram256(a), n);
    const double hb = histogram_entropy(histogram256(b), n);

    double hab = 0.0;
    const double dn = static_cast<double>(n);
    if (n <= 4096) {
        // joint bins via sorted packed pairs; visits nonzero bins in the
        // same (qa,qb)-ascending order as the dense scan
        std::vector<uint32_t> pk(n);
        for (size_t i = 0; i < n; ++i)
            pk[i] = (static_cast<uint32_t>(quant8(a.data()[i])) << 8) |
                    static_cast<uint32_t>(quant8(b.data()[i]));
        std::sort(pk.begin(), pk.end());
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j < n && pk[j] == pk[i]) ++j;
            double pij = static_cast<double>(j - i) / dn;
            hab -= pij * std::log2(pij);
            i = j;
        }
    } else {
        std::vector<uint64_t> joint(256 * 256, 0);
        for (size_t i = 0; i < n; ++i)
            ++joint[(static_cast<size_t>(quant8(a.data()[i])) << 8) +
                    static_cast<size_t>(quant8(b.data()[i]))];
        for (uint64_t c : joint) {
            if (c == 0) continue;
            double pij = static_cast<double>(c) / dn;
            hab -= pij * std::log2(pij);
        }
    }
    return ha + hb - hab;
}

double vif(const GrayImage& p, const GrayImage& r) {
    require_same_shape(p, r, "vif");
    if (p.width() < 32 || p.height() < 32)
        throw TooSmall("vif: both dimensions must be >= 32");
    constexpr double sigma_n2 = 2.0;
    constexpr double eps = 1e-10;

    GrayImage ap = to255(p), ar = to255(r);
    double num = 0.0, den = 0.0;
    for (int s = 1; s <= 4; ++s) {
        if (s > 1) {
            ap = downsample2(ap);
            ar = downsample2(ar);
        }
        const int radius = std::min(2 * s + 1, 11);
        const std::vector<double> taps = gaussian_taps(radius, static_cast<double>(s));
        const size_t n = ap.size();

        const GrayImage mu_p = separable_blur(ap, taps);
        const GrayImage mu_r = separable_blur(ar, taps);
        GrayImage buf(ap.width(), ap.height());
        kernels::mul(ap.data(), ap.data(), buf.data(), n);
        const GrayImage m_pp = separable_blur(buf, taps);
        kernels::mul(ar.data(), ar.data(), buf.data(), n);
        const GrayImage m_rr = separable_blur(buf, taps);
        kernels::mul(ap.data(), ar.data(), buf.data(), n);
        const GrayImage m_pr = separable_blur(buf, taps);

        for (size_t i = 0; i < n; ++i) {
            const double up = mu_p.data()[i], ur = mu_r.data()[i];
            const double sp = std::max(m_pp.data()[i] - up * up, 0.0);
            const double sr = std::max(m_rr.data()[i] - ur * ur, 0.0);
            const double spr = m_pr.data()[i] - up * ur;
            const double g = spr / (sr + eps);
            const double sv = std::max(sp - g * spr, 0.0);
            num += std::log2(1.0 + g * g * sr / (sv + sigma_n2));
            den += std::log2(1.0 + sr / sigma_n2);
        }
    }
    if (den <= 0.0) return 1.0;  // flat reference carries no information
    return num / den;
}

}  // namespace aefuse
