#include "aefuse/train.hpp"

#include <algorithm>
#include <numeric>

#include "aefuse/rng.hpp"

namespace aefuse {
namespace {

GrayImage crop(const GrayImage& img, int ox, int oy, int cw, int ch) {
    GrayImage out(cw, ch);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x) out.at(y, x) = img.at(oy + y, ox + x);
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size < 1) throw RangeError("train: batch_size must be at least 1");
    if (epochs < 1) throw RangeError("train: epochs must be at least 1");
    if (learning_rate < 0.0) throw RangeError("train: learning_rate must be non-negative");
    if (crop_size < 16) throw RangeError("train: crop_size must be at least 16");
    if (momentum < 0.0 || momentum >= 1.0) throw RangeError("train: momentum must be in [0,1)");
}

std::vector<LossReport> train(FusionNet& net, const std::vector<TrainSample>& data,
                              const TrainConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw EmptyDataset("train: no samples");
    for (const TrainSample& s : data) {
        if (cfg.mode != LossMode::Unsupervised && !s.oracle)
            throw MissingOracle("train: sample '" + s.pair.id + "' has no oracle image");
        if (s.oracle && !s.oracle->same_shape(s.pair.a))
            throw DimensionMismatch("train: oracle shape differs for pair '" + s.pair.id + "'");
    }

    Rng rng(cfg.seed);
    std::array<double, FusionNet::kParams> velocity{};
    std::vector<size_t> order(data.size());
    std::iota(order.begin(), order.end(), size_t{0});

    std::vector<LossReport> trace;
    trace.reserve(cfg.epochs);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        LossReport epoch_rep;
        epoch_rep.epoch = epoch;

        for (size_t pos = 0; pos < order.size();) {
            const size_t take = std::min(static_cast<size_t>(cfg.batch_size),
                                         order.size() - pos);
            std::array<double, FusionNet::kParams> grad{};
            for (size_t k = 0; k < take; ++k, ++pos) {
                const TrainSample& s = data[order[pos]];
                const int cw = std::min(cfg.crop_size, s.pair.a.width());
                const int ch = std::min(cfg.crop_size, s.pair.a.height());
                const int ox = static_cast<int>(rng.below(s.pair.a.width() - cw + 1));
                const int oy = static_cast<int>(rng.below(s.pair.a.height() - ch + 1));

                ImagePair sub(s.pair.id, crop(s.pair.a, ox, oy, cw, ch),
                              crop(s.pair.b, ox, oy, cw, ch), s.pair.task);
                GrayImage oracle_crop;
                const GrayImage* oracle = nullptr;
                if (s.oracle) {
                    oracle_crop = crop(*s.oracle, ox, oy, cw, ch);
                    oracle = &oracle_crop;
                }
                LossReport rep = loss_total(net, sub, oracle, cfg.mode, &grad);
                epoch_rep.total += rep.total;
                epoch_rep.term_supervised += rep.term_supervised;
                epoch_rep.term_unsupervised += rep.term_unsupervised;
            }
            const double inv = 1.0 / static_cast<double>(take);
            for (int i = 0; i < FusionNet::kParams; ++i) {
                velocity[i] = cfg.momentum * velocity[i] - cfg.learning_rate * grad[i] * inv;
                net.params()[i] += velocity[i];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(data.size());
        epoch_rep.total *= inv_n;
        epoch_rep.term_supervised *= inv_n;
        epoch_rep.term_unsupervised *= inv_n;
        trace.push_back(epoch_rep);
    }
    return trace;
}

}  // namespace aefuse
