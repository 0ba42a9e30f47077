#pragma once

#include <array>
#include <string>

#include "aefuse/image.hpp"
#include "aefuse/metrics.hpp"
#include "aefuse/niqe.hpp"

namespace aefuse {

// Maps a raw metric value onto a [0,1] quality score (1 best).
struct NormMap {
    enum class Kind { AffineClamp, Reciprocal };
    Kind kind = Kind::AffineClamp;
    double lo = 0.0;
    double hi = 1.0;
    bool flip = false;  // affine only: lower raw values are better

    double apply(double v) const;
};

// Weighting of the two evaluator families plus the per-metric normalizers.
// alpha order: NIQE, EN, VIF, AG, PSNR, SSIM.
struct QualityWeights {
    double beta = 0.5;   // reference SSIM term
    double beta1 = 0.5;  // reference PSNR term
    std::array<double, 6> alpha{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
    std::array<NormMap, 7> norm;  // indexed by MetricId

    QualityWeights();
    const NormMap& norm_for(MetricId m) const { return norm[static_cast<size_t>(m)]; }
    NormMap& norm_for(MetricId m) { return norm[static_cast<size_t>(m)]; }
    void validate() const;  // throws RangeError
};

double normalize_metric(const QualityWeights& w, MetricId m, double value);

// Reference-based score: beta*norm(SSIM(p,r)) + beta1*norm(PSNR(p,r)).
double eval_supervised(const GrayImage& p, const GrayImage& r, const QualityWeights& w);

// Reference-free family scored against one source: weighted sum of the six
// normalized metrics NIQE, EN, VIF, AG, PSNR, SSIM.
double eval_crossmodal(const GrayImage& p, const GrayImage& r, const QualityWeights& w,
                       const NssModel& model);

// Mean of eval_crossmodal against both sources of a pair.
double eval_pair_quality(const GrayImage& x, const GrayImage& y, const GrayImage& p,
                         const QualityWeights& w, const NssModel& model);

// Per-candidate report row. EN/AG/NIQE are native single-image values.
// SSIM/VIF/PSNR hold the pair-averaged normalized score mapped back onto the
// native scale (PSNR in dB, capped at 60), so that applying the normalizers
// and weights to the columns reproduces e2 exactly. MI is the raw pair
// average and takes no part in e2.
struct CandidateReport {
    double en, ag, niqe;
    double ssim, vif, psnr;
    double mi;
    double e2;
};

CandidateReport measure_candidate(const GrayImage& x, const GrayImage& y, const GrayImage& p,
                                  const QualityWeights& w, const NssModel& model);

enum class EvalKind { Supervised, CrossModal };

std::string evaluator_tag(EvalKind kind, const QualityWeights& w, const NssModel& model);

// Bundles everything needed to score a fusion candidate; the tag pins the
// configuration so cached scores can be invalidated on change.
struct Evaluator {
    EvalKind kind = EvalKind::CrossModal;
    QualityWeights weights;
    NssModel model;
    std::string tag;

    static Evaluator cross_modal(QualityWeights w, NssModel m);
    static Evaluator supervised(QualityWeights w, NssModel m);

    // ref may be null for the cross-modal family
    double score(const ImagePair& pair, const GrayImage& fused, const GrayImage* ref) const;
};

}  // namespace aefuse
