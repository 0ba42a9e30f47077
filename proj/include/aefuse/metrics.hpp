#pragma once

#include "aefuse/image.hpp"

namespace aefuse {

enum class MetricId { EN, AG, SSIM, VIF, NIQE, PSNR, MI };

const char* metric_name(MetricId m);

// Shannon entropy of the 8-bit histogram, in [0,8] bits.
double entropy(const GrayImage& img);

// Mean forward-difference gradient magnitude sqrt((dx^2+dy^2)/2) on the 255
// scale, averaged over the (h-1)x(w-1) valid grid.
double avg_gradient(const GrayImage& img);

// Gaussian-windowed SSIM (11x11, sigma 1.5) on the 255 scale with
// C1=(0.01*255)^2, C2=(0.03*255)^2, averaged over all pixels.
double ssim(const GrayImage& p, const GrayImage& r);

// 10*log10(255^2/MSE); +infinity for identical images.
double psnr(const GrayImage& p, const GrayImage& r);

// H(a) + H(b) - H(a,b) over the 256x256 joint 8-bit histogram.
double mutual_information(const GrayImage& a, const GrayImage& b);

// Pixel-domain visual information fidelity over 4 dyadic scales; Gaussian
// window radius min(2s+1,11) with sigma s at scale s, noise variance 2 on
// the 255 scale. A reference with no information (flat) scores 1 by
// convention.
double vif(const GrayImage& p, const GrayImage& r);

}  // namespace aefuse
