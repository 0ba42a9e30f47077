#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aefuse/loss.hpp"
#include "aefuse/net.hpp"

namespace aefuse {

struct TrainConfig {
    int batch_size = 5;
    int epochs = 50;
    double learning_rate = 1e-5;
    int crop_size = 128;
    double momentum = 0.9;
    LossMode mode = LossMode::SemiSupervised;
    uint64_t seed = 0;

    void validate() const;
};

struct TrainSample {
    ImagePair pair;
    std::optional<GrayImage> oracle;  // required unless training unsupervised
};

// SGD with momentum over seeded shuffles and random crops. Deterministic for
// a fixed config, dataset order, and seed. Returns one report per epoch with
// loss terms averaged over the samples.
std::vector<LossReport> train(FusionNet& net, const std::vector<TrainSample>& data,
                              const TrainConfig& cfg);

}  // namespace aefuse
