#include "aefuse/loss.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "aefuse/filter.hpp"
#include "aefuse/kernels.hpp"

namespace aefuse {
namespace {

constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2 on the unit scale
constexpr double kC2 = 0.03 * 0.03;
constexpr double kGradEps = 1e-12;  // smooths |grad| at zero

int clampi(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

// Adjoint of separable_blur: the forward pass gathers through clamped taps,
// so the adjoint scatters through the same taps (columns first, undoing the
// rows-then-columns order).
GrayImage blur_adjoint(const GrayImage& g, const std::vector<double>& taps) {
    const int w = g.width();
    const int h = g.height();
    const int R = static_cast<int>(taps.size() / 2);
    GrayImage mid(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = g.at(y, x);
            if (v == 0.0) continue;
            for (int t = -R; t <= R; ++t) mid.at(clampi(y + t, h - 1), x) += taps[t + R] * v;
        }
    GrayImage out(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = mid.at(y, x);
            if (v == 0.0) continue;
            for (int t = -R; t <= R; ++t) out.at(y, clampi(x + t, w - 1)) += taps[t + R] * v;
        }
    return out;
}

GrayImage hadamard(const GrayImage& a, const GrayImage& b) {
    GrayImage out(a.width(), a.height());
    kernels::mul(a.data(), b.data(), out.data(), a.size());
    return out;
}

}  // namespace

const char* loss_mode_name(LossMode m) {
    switch (m) {
        case LossMode::Unsupervised: return "unsupervised";
        case LossMode::SemiSupervised: return "semisupervised";
        case LossMode::Supervised: return "supervised";
    }
    return "unsupervised";
}

LossMode parse_loss_mode(const std::string& token) {
    std::string t;
    for (char c : token)
        if (c != '_' && c != '-') t.push_back(static_cast<char>(std::tolower(
                static_cast<unsigned char>(c))));
    if (t == "unsupervised") return LossMode::Unsupervised;
    if (t == "semisupervised" || t == "semi") return LossMode::SemiSupervised;
    if (t == "supervised") return LossMode::Supervised;
    throw TypeError("unknown loss mode '" + token + "'");
}

double ssim_unit(const GrayImage& p, const GrayImage& r, GrayImage* grad) {
    if (!p.same_shape(r)) throw DimensionMismatch("ssim: shapes differ");
    const int w = p.width();
    const int h = p.height();
    const size_t n = p.size();
    const std::vector<double> taps = gaussian_taps(5, 1.5);

    GrayImage up = separable_blur(p, taps);
    GrayImage ur = separable_blur(r, taps);
    GrayImage mpp = separable_blur(hadamard(p, p), taps);
    GrayImage mrr = separable_blur(hadamard(r, r), taps);
    GrayImage mpr = separable_blur(hadamard(p, r), taps);

    GrayImage smap(w, h);
    GrayImage d_mu, d_sp, d_spr;
    if (grad) {
        d_mu = GrayImage(w, h);
        d_sp = GrayImage(w, h);
        d_spr = GrayImage(w, h);
    }
    for (size_t i = 0; i < n; ++i) {
        const double mu_p = up.data()[i];
        const double mu_r = ur.data()[i];
        const double sp = mpp.data()[i] - mu_p * mu_p;
        const double sr = mrr.data()[i] - mu_r * mu_r;
        const double spr = mpr.data()[i] - mu_p * mu_r;
        const double A1 = 2.0 * mu_p * mu_r + kC1;
        const double A2 = 2.0 * spr + kC2;
        const double B1 = mu_p * mu_p + mu_r * mu_r + kC1;
        const double B2 = sp + sr + kC2;
        smap.data()[i] = (A1 * A2) / (B1 * B2);
        if (grad) {
            const double denom = B1 * B2;
            d_mu.data()[i] = (2.0 * mu_r * A2) / denom - (2.0 * mu_p * A1 * A2) / (B1 * denom);
            d_sp.data()[i] = -(A1 * A2) / (B2 * denom);
            d_spr.data()[i] = (2.0 * A1) / denom;
        }
    }
    const double mean = kernels::sum(smap.data(), n) / static_cast<double>(n);

    if (grad) {
        GrayImage t_mu = blur_adjoint(d_mu, taps);
        GrayImage t_sp = blur_adjoint(d_sp, taps);
        GrayImage t_sp_mu = blur_adjoint(hadamard(d_sp, up), taps);
        GrayImage t_spr = blur_adjoint(d_spr, taps);
        GrayImage t_spr_mu = blur_adjoint(hadamard(d_spr, ur), taps);
        *grad = GrayImage(w, h);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (size_t i = 0; i < n; ++i)
            grad->data()[i] = inv_n * (t_mu.data()[i] + 2.0 * p.data()[i] * t_sp.data()[i] -
                                       2.0 * t_sp_mu.data()[i] + r.data()[i] * t_spr.data()[i] -
                                       t_spr_mu.data()[i]);
    }
    return mean;
}

double loss_supervised(const GrayImage& p, const GrayImage& oracle, GrayImage* grad) {
    if (!p.same_shape(oracle)) throw DimensionMismatch("loss: oracle shape differs");
    const size_t n = p.size();
    const double mse = kernels::sse(p.data(), oracle.data(), n) / static_cast<double>(n);
    GrayImage ds;
    const double s = ssim_unit(p, oracle, grad ? &ds : nullptr);
    if (grad) {
        *grad = GrayImage(p.width(), p.height());
        const double inv_n = 1.0 / static_cast<double>(n);
        for (size_t i = 0; i < n; ++i)
            grad->data()[i] = (p.data()[i] - oracle.data()[i]) * inv_n - 0.5 * ds.data()[i];
    }
    return 0.5 * mse + 0.5 * (1.0 - s);
}

double loss_unsupervised(const GrayImage& p, const GrayImage& src_a, const GrayImage& src_b,
                         GrayImage* grad) {
    if (!p.same_shape(src_a) || !p.same_shape(src_b))
        throw DimensionMismatch("loss: source shapes differ");
    const int w = p.width();
    const int h = p.height();
    if (w < 2 || h < 2) throw TooSmall("loss: gradient term needs at least 2x2");

    GrayImage dsa, dsb;
    const double sa = ssim_unit(p, src_a, grad ? &dsa : nullptr);
    const double sb = ssim_unit(p, src_b, grad ? &dsb : nullptr);

    // forward-difference magnitude, smoothed so constant regions have a
    // well-defined (zero) gradient
    auto mag = [](const GrayImage& img, int y, int x) {
        const double dx = img.at(y, x + 1) - img.at(y, x);
        const double dy = img.at(y + 1, x) - img.at(y, x);
        return std::sqrt(dx * dx + dy * dy + kGradEps);
    };

    const double K = static_cast<double>(w - 1) * static_cast<double>(h - 1);
    double gp = 0.0;
    if (grad) *grad = GrayImage(w, h, 0.0);
    for (int y = 0; y < h - 1; ++y) {
        for (int x = 0; x < w - 1; ++x) {
            const double dx = p.at(y, x + 1) - p.at(y, x);
            const double dy = p.at(y + 1, x) - p.at(y, x);
            const double gm = std::sqrt(dx * dx + dy * dy + kGradEps);
            const double target = std::max(mag(src_a, y, x), mag(src_b, y, x));
            const double diff = gm - target;
            gp += diff * diff;
            if (grad) {
                // d(diff^2) scattered through gm onto the stencil, with the
                // 0.5/K loss weight folded in
                const double c = (diff / gm) / K;
                const double tx = c * dx;
                const double ty = c * dy;
                grad->at(y, x + 1) += tx;
                grad->at(y + 1, x) += ty;
                grad->at(y, x) -= tx + ty;
            }
        }
    }
    gp /= K;

    if (grad)
        for (size_t i = 0; i < p.size(); ++i)
            grad->data()[i] += -0.25 * dsa.data()[i] - 0.25 * dsb.data()[i];
    return 0.25 * (1.0 - sa) + 0.25 * (1.0 - sb) + 0.5 * gp;
}

LossReport loss_total(const FusionNet& net, const ImagePair& pair, const GrayImage* oracle,
                      LossMode mode, std::array<double, FusionNet::kParams>* grad) {
    FusionNet::Trace trace;
    GrayImage p = net.fuse(pair.a, pair.b, &trace);

    LossReport rep;
    GrayImage g_sup, g_unsup;
    if (mode != LossMode::Unsupervised) {
        if (!oracle) throw MissingOracle("loss: mode needs an oracle image for pair '" +
                                         pair.id + "'");
        rep.term_supervised = loss_supervised(p, *oracle, grad ? &g_sup : nullptr);
    }
    if (mode != LossMode::Supervised)
        rep.term_unsupervised = loss_unsupervised(p, pair.a, pair.b, grad ? &g_unsup : nullptr);

    double unsup_weight = 0.0;
    switch (mode) {
        case LossMode::Supervised: rep.total = rep.term_supervised; break;
        case LossMode::Unsupervised:
            rep.total = rep.term_unsupervised;
            unsup_weight = 1.0;
            break;
        case LossMode::SemiSupervised:
            rep.total = rep.term_supervised + 0.5 * rep.term_unsupervised;
            unsup_weight = 0.5;
            break;
    }

    if (grad) {
        GrayImage dLdp(p.width(), p.height(), 0.0);
        if (mode != LossMode::Unsupervised)
            for (size_t i = 0; i < dLdp.size(); ++i) dLdp.data()[i] += g_sup.data()[i];
        if (mode != LossMode::Supervised)
            for (size_t i = 0; i < dLdp.size(); ++i)
                dLdp.data()[i] += unsup_weight * g_unsup.data()[i];
        net.backward(pair.a, pair.b, trace, dLdp, *grad);
    }
    return rep;
}

}  // namespace aefuse
