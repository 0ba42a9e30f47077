#pragma once

#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aefuse/image.hpp"

namespace aefuse {

struct FusionMethodId {
    std::string name;
    int version = 1;

    bool operator==(const FusionMethodId&) const = default;
};

// weight on source a; result clamped to [0,1], exact at weight 1 and a==b
GrayImage fuse_average(const ImagePair& pair, double weight);

// per pixel, take the source with the larger sum of squared Laplacian
// responses over the (2r+1)^2 window; ties go to a
GrayImage fuse_max_energy(const ImagePair& pair, int window_radius);

// band-pass levels fused by max absolute coefficient, base level averaged
GrayImage fuse_laplacian_pyramid(const ImagePair& pair, int levels);

// ratio-of-lowpass levels fused by max deviation from 1, base averaged
GrayImage fuse_ratio_pyramid(const ImagePair& pair, int levels);

// mean-filter base/detail split (radius 15); detail recombined with
// per-pixel saliency weights |mean3 - mean15| that sum to one
GrayImage fuse_two_scale_saliency(const ImagePair& pair);

// Pyramid plumbing shared by the pyramid operators, exposed for validation.
int max_pyramid_levels(const GrayImage& img);
Pyramid build_gaussian_pyramid(const GrayImage& img, int levels);
Pyramid build_laplacian_pyramid(const GrayImage& img, int levels);  // last entry is the base
GrayImage collapse_laplacian(const Pyramid& bands);

using FusionFn = std::function<GrayImage(const ImagePair&)>;

struct MethodEntry {
    FusionMethodId id;
    std::set<Task> tasks;  // tasks this method is tagged for
    FusionFn fn;
};

class MethodRegistry {
public:
    void add(FusionMethodId id, std::set<Task> tasks, FusionFn fn);
    const std::vector<MethodEntry>& entries() const { return entries_; }
    const MethodEntry* find(const std::string& name) const;
    size_t size() const { return entries_.size(); }

private:
    std::vector<MethodEntry> entries_;
};

// Every method tagged for the pair's task, in registration order; a pair
// with Unknown task runs everything.
std::vector<std::pair<FusionMethodId, GrayImage>> registry_fuse_all(const MethodRegistry& reg,
                                                                    const ImagePair& pair);

std::set<Task> all_tasks();

// The five stock operators with default parameters, tagged for every task.
MethodRegistry default_registry();

}  // namespace aefuse
