#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aefuse/image.hpp"

namespace aefuse {

// Dense stencil with odd side lengths, centered on the output pixel.
struct Kernel2D {
    int kw = 0, kh = 0;
    std::vector<double> w;  // row-major, kh x kw

    Kernel2D() = default;
    Kernel2D(int kw_, int kh_, std::vector<double> w_);
    double at(int ky, int kx) const { return w[static_cast<size_t>(ky) * kw + kx]; }
};

// Sliding inner product (correlation) with replicate borders; output is not
// clamped and may leave [0,1].
GrayImage convolve(const GrayImage& img, const Kernel2D& k);

// Normalized 1-D Gaussian taps, length 2*radius+1.
std::vector<double> gaussian_taps(int radius, double sigma);
// Separable 2-D Gaussian stencil, normalized to unit sum.
Kernel2D gaussian_kernel(int radius, double sigma);

// Two-pass separable filters (rows then columns), replicate borders.
GrayImage separable_blur(const GrayImage& img, const std::vector<double>& taps);
GrayImage gaussian_blur(const GrayImage& img, int radius, double sigma);
GrayImage box_blur(const GrayImage& img, int radius);   // normalized mean filter
GrayImage box_sum(const GrayImage& img, int radius);    // unnormalized window sum

// Gaussian blur (radius 2, sigma 1.0) followed by decimation at even
// indices; output dims are ceil(dim/2).
GrayImage downsample2(const GrayImage& img);

// Inverse step of downsample2: zero-insert expansion with the same kernel,
// each output renormalized over the taps that land on inserted samples, so a
// constant image expands to itself. Target dims must be 2*dim or 2*dim-1.
GrayImage upsample2(const GrayImage& img, int target_w, int target_h);

// bin k counts pixels whose 8-bit quantization round(i*255) equals k
std::array<uint64_t, 256> histogram256(const GrayImage& img);

}  // namespace aefuse
