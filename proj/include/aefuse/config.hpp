#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aefuse/evaluate.hpp"
#include "aefuse/fusion.hpp"
#include "aefuse/train.hpp"

namespace aefuse {

// Per-method overrides; only the field a method actually uses is honored.
struct MethodParams {
    std::optional<double> weight;
    std::optional<int> radius;
    std::optional<int> levels;
    std::optional<std::vector<Task>> tasks;
};

struct Config {
    EvalKind evaluator = EvalKind::CrossModal;
    QualityWeights weights;
    std::optional<std::filesystem::path> nss_model;
    uint32_t nss_patch_size = 96;
    double nss_sharpness_fraction = 0.75;
    std::vector<std::string> methods;  // empty selects every built-in method
    std::map<std::string, MethodParams> method_params;
    TrainConfig train;
    std::optional<std::filesystem::path> cache_dir;
    uint64_t seed = 0;
};

// key = value lines, '#' comments, dotted keys. Unknown keys and malformed
// values are rejected with file:line diagnostics. Keys may appear in any
// order.
Config parse_config(std::istream& in, const std::string& origin);
Config load_config(const std::filesystem::path& file);

// Registry holding the configured method subset with overrides applied.
MethodRegistry build_registry(const Config& cfg);

}  // namespace aefuse
