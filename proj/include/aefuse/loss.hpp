#pragma once

#include <array>

#include "aefuse/image.hpp"
#include "aefuse/net.hpp"

namespace aefuse {

enum class LossMode { Unsupervised, SemiSupervised, Supervised };

const char* loss_mode_name(LossMode m);
LossMode parse_loss_mode(const std::string& token);

struct LossReport {
    int epoch = 0;
    double total = 0.0;
    double term_supervised = 0.0;
    double term_unsupervised = 0.0;
};

// Structural similarity on the [0,1] intensity scale (K1=0.01, K2=0.03,
// 11x11 Gaussian window, replicate borders). Tolerates images smaller than
// the window. grad, when given, receives d(mean SSIM)/d(p).
double ssim_unit(const GrayImage& p, const GrayImage& r, GrayImage* grad = nullptr);

// 0.5*MSE + 0.5*(1 - SSIM) against the oracle image.
double loss_supervised(const GrayImage& p, const GrayImage& oracle, GrayImage* grad = nullptr);

// Source-consistency loss: per-source SSIM terms plus a gradient-preservation
// penalty against the pixelwise-max source gradient magnitude.
double loss_unsupervised(const GrayImage& p, const GrayImage& src_a, const GrayImage& src_b,
                         GrayImage* grad = nullptr);

// Runs the net forward, composes the mode's loss, and (when grad is given)
// backpropagates into the parameters. grad is accumulated, not reset.
LossReport loss_total(const FusionNet& net, const ImagePair& pair, const GrayImage* oracle,
                      LossMode mode, std::array<double, FusionNet::kParams>* grad = nullptr);

}  // namespace aefuse
