#include "aefuse/net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "aefuse/kernels.hpp"
#include "aefuse/rng.hpp"

namespace aefuse {
namespace {

constexpr const char* kMagic = "AENET1";
constexpr size_t kMagicLen = 6;
constexpr size_t kFileLen = kMagicLen + FusionNet::kParams * sizeof(double);

int clampi(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

// Replicate-padded 3x3 convolution; fixed ic,ky,kx inner order keeps the
// accumulation deterministic.
std::vector<GrayImage> conv3x3(const std::vector<const GrayImage*>& in, const double* W,
                               const double* b, int out_ch) {
    const int w = in[0]->width();
    const int h = in[0]->height();
    const int in_ch = static_cast<int>(in.size());
    std::vector<GrayImage> out;
    out.reserve(out_ch);
    for (int oc = 0; oc < out_ch; ++oc) {
        GrayImage o(w, h);
        const double* Woc = W + static_cast<size_t>(oc) * in_ch * 9;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = b[oc];
                for (int ic = 0; ic < in_ch; ++ic) {
                    const double* Wc = Woc + static_cast<size_t>(ic) * 9;
                    for (int ky = 0; ky < 3; ++ky) {
                        const double* row = in[ic]->row(clampi(y + ky - 1, h - 1));
                        for (int kx = 0; kx < 3; ++kx)
                            acc += Wc[ky * 3 + kx] * row[clampi(x + kx - 1, w - 1)];
                    }
                }
                o.at(y, x) = acc;
            }
        }
        out.push_back(std::move(o));
    }
    return out;
}

void relu_inplace(std::vector<GrayImage>& maps) {
    for (GrayImage& m : maps)
        for (double& v : m.pixels()) v = v > 0.0 ? v : 0.0;
}

// Scatters dz through the conv: weight/bias grads plus (optionally) input
// grads, mirroring the clamped taps of the forward pass.
void conv3x3_backward(const std::vector<const GrayImage*>& in, const double* W, int in_ch,
                      const std::vector<GrayImage>& dz, double* dW, double* db,
                      std::vector<GrayImage>* din) {
    const int w = in[0]->width();
    const int h = in[0]->height();
    for (size_t oc = 0; oc < dz.size(); ++oc) {
        const double* Woc = W + oc * in_ch * 9;
        double* dWoc = dW + oc * in_ch * 9;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double g = dz[oc].at(y, x);
                if (g == 0.0) continue;
                db[oc] += g;
                for (int ic = 0; ic < in_ch; ++ic) {
                    for (int ky = 0; ky < 3; ++ky) {
                        const int cy = clampi(y + ky - 1, h - 1);
                        for (int kx = 0; kx < 3; ++kx) {
                            const int cx = clampi(x + kx - 1, w - 1);
                            dWoc[(ic * 3 + ky) * 3 + kx] += g * in[ic]->at(cy, cx);
                            if (din) (*din)[ic].at(cy, cx) += Woc[(ic * 3 + ky) * 3 + kx] * g;
                        }
                    }
                }
            }
        }
    }
}

std::vector<const GrayImage*> ptrs(const std::vector<GrayImage>& maps) {
    std::vector<const GrayImage*> p;
    p.reserve(maps.size());
    for (const GrayImage& m : maps) p.push_back(&m);
    return p;
}

// The stock hyperparameters (lr 1e-5) assume 8-bit-range inputs, so the
// first layer sees 255*x; its init shrinks by the same factor to keep the
// activation scale put.
constexpr double kInputScale = 255.0;

GrayImage on_input_scale(const GrayImage& img) {
    GrayImage out = img;
    for (double& v : out.pixels()) v *= kInputScale;
    return out;
}

}  // namespace

FusionNet FusionNet::random_init(uint64_t seed) {
    FusionNet net;
    Rng rng(seed);
    for (double& p : net.params_) p = rng.uniform(-0.05, 0.05);
    for (int i = kW1; i < kB1; ++i) net.params_[static_cast<size_t>(i)] /= kInputScale;
    // deeper taps start near He scale for fan-in 72; the stock range underdrives
    // the backward signal at learning rates the trainer defaults to
    for (int i = kW2; i < kB2; ++i) net.params_[static_cast<size_t>(i)] *= 5.8;
    for (int i = kW3; i < kB3; ++i) net.params_[static_cast<size_t>(i)] *= 5.8;
    return net;
}

GrayImage FusionNet::weight_map(const GrayImage& a, const GrayImage& b, Trace* trace) const {
    if (!a.same_shape(b)) throw DimensionMismatch("net: input shapes differ");
    const double* P = params_.data();
    const GrayImage sa = on_input_scale(a), sb = on_input_scale(b);
    std::vector<GrayImage> h1 = conv3x3({&sa, &sb}, P + kW1, P + kB1, kChannels);
    relu_inplace(h1);
    std::vector<GrayImage> h2 = conv3x3(ptrs(h1), P + kW2, P + kB2, kChannels);
    relu_inplace(h2);
    std::vector<GrayImage> z3 = conv3x3(ptrs(h2), P + kW3, P + kB3, 1);
    GrayImage w = std::move(z3[0]);
    for (double& v : w.pixels()) v = 1.0 / (1.0 + std::exp(-v));
    if (trace) {
        trace->h1 = std::move(h1);
        trace->h2 = std::move(h2);
        trace->weight = w;
    }
    return w;
}

GrayImage FusionNet::fuse(const GrayImage& a, const GrayImage& b, Trace* trace) const {
    GrayImage w = weight_map(a, b, trace);
    GrayImage out(a.width(), a.height());
    kernels::mix_map(a.data(), b.data(), w.data(), out.data(), a.size());
    return out;
}

void FusionNet::backward(const GrayImage& a, const GrayImage& b, const Trace& trace,
                         const GrayImage& dfused, std::array<double, kParams>& grad) const {
    const int w = a.width();
    const int h = a.height();
    const double* P = params_.data();
    double* G = grad.data();

    // fused = b + w*(a-b); dz3 folds in the sigmoid derivative
    std::vector<GrayImage> dz3(1, GrayImage(w, h));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double wm = trace.weight.at(y, x);
            dz3[0].at(y, x) = dfused.at(y, x) * (a.at(y, x) - b.at(y, x)) * wm * (1.0 - wm);
        }

    std::vector<GrayImage> dh2(kChannels, GrayImage(w, h));
    conv3x3_backward(ptrs(trace.h2), P + kW3, kChannels, dz3, G + kW3, G + kB3, &dh2);
    for (int c = 0; c < kChannels; ++c)
        for (size_t i = 0; i < dh2[c].size(); ++i)
            if (trace.h2[c].data()[i] <= 0.0) dh2[c].data()[i] = 0.0;

    std::vector<GrayImage> dh1(kChannels, GrayImage(w, h));
    conv3x3_backward(ptrs(trace.h1), P + kW2, kChannels, dh2, G + kW2, G + kB2, &dh1);
    for (int c = 0; c < kChannels; ++c)
        for (size_t i = 0; i < dh1[c].size(); ++i)
            if (trace.h1[c].data()[i] <= 0.0) dh1[c].data()[i] = 0.0;

    const GrayImage sa = on_input_scale(a), sb = on_input_scale(b);
    conv3x3_backward({&sa, &sb}, P + kW1, 2, dh1, G + kW1, G + kB1, nullptr);
}

std::string net_bytes(const FusionNet& net) {
    static_assert(std::endian::native == std::endian::little, "serialization assumes LE host");
    std::string out(kMagic, kMagicLen);
    out.resize(kFileLen);
    std::memcpy(out.data() + kMagicLen, net.params().data(),
                FusionNet::kParams * sizeof(double));
    return out;
}

void net_store(const FusionNet& net, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("net: cannot create '" + file.string() + "'");
    const std::string bytes = net_bytes(net);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoFailure("net: write failure on '" + file.string() + "'");
}

FusionNet net_load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoFailure("net: cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoFailure("net: read failure on '" + file.string() + "'");
    const std::string buf = ss.str();
    if (buf.size() < kMagicLen || buf.compare(0, kMagicLen, kMagic) != 0)
        throw BadMagic("net: missing AENET1 magic in '" + file.string() + "'");
    if (buf.size() != kFileLen)
        throw WrongLength("net: '" + file.string() + "' is " + std::to_string(buf.size()) +
                          " bytes, expected " + std::to_string(kFileLen));
    FusionNet net;
    std::memcpy(net.params().data(), buf.data() + kMagicLen,
                FusionNet::kParams * sizeof(double));
    return net;
}

}  // namespace aefuse
