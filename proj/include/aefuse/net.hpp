#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aefuse/image.hpp"

namespace aefuse {

// Three 3x3 conv layers (2->8->8->1, ReLU/ReLU/sigmoid) over the sources on
// the 8-bit scale, producing a per-pixel blend weight w in (0,1); the fused
// image is b + w*(a-b). 809 parameters.
class FusionNet {
public:
    static constexpr int kChannels = 8;
    static constexpr int kParams = 809;

    // flat layout: W1 b1 W2 b2 W3 b3, conv weights out-major (oc, ic, ky, kx)
    static constexpr int kW1 = 0;    // 8*2*3*3 = 144
    static constexpr int kB1 = 144;  // 8
    static constexpr int kW2 = 152;  // 8*8*3*3 = 576
    static constexpr int kB2 = 728;  // 8
    static constexpr int kW3 = 736;  // 1*8*3*3 = 72
    static constexpr int kB3 = 808;  // 1

    FusionNet() { params_.fill(0.0); }

    static FusionNet random_init(uint64_t seed);

    std::array<double, kParams>& params() { return params_; }
    const std::array<double, kParams>& params() const { return params_; }

    // Stashed activations so backward can reuse the forward pass.
    struct Trace {
        std::vector<GrayImage> h1;  // post-ReLU, kChannels maps
        std::vector<GrayImage> h2;
        GrayImage weight;  // sigmoid output
    };

    GrayImage weight_map(const GrayImage& a, const GrayImage& b, Trace* trace = nullptr) const;
    GrayImage fuse(const GrayImage& a, const GrayImage& b, Trace* trace = nullptr) const;

    // Accumulates d(loss)/d(params) given d(loss)/d(fused); trace must come
    // from a forward pass over the same inputs.
    void backward(const GrayImage& a, const GrayImage& b, const Trace& trace,
                  const GrayImage& dfused, std::array<double, kParams>& grad) const;

private:
    std::array<double, kParams> params_{};
};

// "AENET1" magic + 809 little-endian doubles.
std::string net_bytes(const FusionNet& net);
void net_store(const FusionNet& net, const std::filesystem::path& file);
FusionNet net_load(const std::filesystem::path& file);

}  // namespace aefuse
