#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aefuse/image.hpp"

namespace aefuse {

// Multivariate Gaussian fit of 18-dim natural-scene statistics features.
struct NssModel {
    uint32_t patch_size = 96;
    double sharpness_fraction = 0.75;
    std::array<double, 18> mean{};
    std::array<double, 324> cov{};  // row-major 18x18, symmetric

    double cov_at(int i, int j) const { return cov[static_cast<size_t>(i) * 18 + j]; }
};

// Asymmetric generalized Gaussian, moment-matched: one-sided RMS deviations
// plus a shape exponent selected from a fixed grid.
struct AggdFit {
    double alpha;
    double sigma_l;
    double sigma_r;
    double mean_param() const;  // (sigma_r - sigma_l) * Gamma(2/a)/Gamma(1/a)
    double sigma_sym() const;   // sqrt((sigma_l^2 + sigma_r^2)/2)
};

AggdFit aggd_fit(const std::vector<double>& samples);

// Locally normalized luminance (I - mu)/(sigma + 1/255) with a radius-3
// Gaussian window, sigma 7/6.
GrayImage mscn_field(const GrayImage& img);

// Fit the feature distribution of a pristine corpus. Keeps the top
// sharpness_fraction of patches by local-variance sum; needs at least 36
// qualifying patches overall.
NssModel niqe_fit(const std::vector<GrayImage>& corpus, uint32_t patch_size = 96,
                  double sharpness_fraction = 0.75);

// Distance of the image's feature distribution from the model; lower is
// better. Uses the model covariance alone when the image yields fewer than
// 19 patches.
double niqe(const GrayImage& img, const NssModel& model);

double mvg_distance(const std::array<double, 18>& mean1, const std::array<double, 324>& cov1,
                    const std::array<double, 18>& mean2, const std::array<double, 324>& cov2);

std::string nss_bytes(const NssModel& m);
void nss_store(const NssModel& m, const std::filesystem::path& file);
NssModel nss_load(const std::filesystem::path& file);

}  // namespace aefuse
