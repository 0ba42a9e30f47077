#include "aefuse/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "aefuse/digest.hpp"

namespace aefuse {

double NormMap::apply(double v) const {
    if (kind == Kind::Reciprocal) return 1.0 / (1.0 + std::max(v, 0.0));
    double t = (v - lo) / (hi - lo);
    t = std::min(1.0, std::max(0.0, t));
    return flip ? 1.0 - t : t;
}

QualityWeights::QualityWeights() {
    norm_for(MetricId::EN) = {NormMap::Kind::AffineClamp, 0.0, 8.0, false};
    norm_for(MetricId::AG) = {NormMap::Kind::AffineClamp, 0.0, 20.0, false};
    norm_for(MetricId::SSIM) = {NormMap::Kind::AffineClamp, 0.0, 1.0, false};
    norm_for(MetricId::VIF) = {NormMap::Kind::AffineClamp, 0.0, 1.0, false};
    norm_for(MetricId::NIQE) = {NormMap::Kind::Reciprocal, 0.0, 1.0, false};
    norm_for(MetricId::PSNR) = {NormMap::Kind::AffineClamp, 0.0, 60.0, false};
    norm_for(MetricId::MI) = {NormMap::Kind::AffineClamp, 0.0, 8.0, false};
}

void QualityWeights::validate() const {
    if (beta < 0.0 || beta1 < 0.0) throw RangeError("weights: beta terms must be >= 0");
    if (beta + beta1 <= 0.0) throw RangeError("weights: beta + beta1 must be > 0");
    double s = 0.0;
    for (double a : alpha) {
        if (a < 0.0) throw RangeError("weights: alpha terms must be >= 0");
        s += a;
    }
    if (s <= 0.0) throw RangeError("weights: alpha terms must not all be zero");
    for (const NormMap& m : norm)
        if (m.kind == NormMap::Kind::AffineClamp && !(m.hi > m.lo))
            throw RangeError("weights: normalization needs hi > lo");
}

double normalize_metric(const QualityWeights& w, MetricId m, double value) {
    return w.norm_for(m).apply(value);
}

double eval_supervised(const GrayImage& p, const GrayImage& r, const QualityWeights& w) {
    return w.beta * normalize_metric(w, MetricId::SSIM, ssim(p, r)) +
           w.beta1 * normalize_metric(w, MetricId::PSNR, psnr(p, r));
}

namespace {

// E2 with the single-image terms precomputed, so the pair variant scores
// both sources without re-measuring p.
double crossmodal_from_parts(double n_niqe, double n_en, double n_ag, const GrayImage& p,
                             const GrayImage& r, const QualityWeights& w, double* n_vif,
                             double* n_psnr, double* n_ssim) {
    const double nv = normalize_metric(w, MetricId::VIF, vif(p, r));
    const double np = normalize_metric(w, MetricId::PSNR, psnr(p, r));
    const double ns = normalize_metric(w, MetricId::SSIM, ssim(p, r));
    if (n_vif) *n_vif = nv;
    if (n_psnr) *n_psnr = np;
    if (n_ssim) *n_ssim = ns;
    return w.alpha[0] * n_niqe + w.alpha[1] * n_en + w.alpha[2] * nv + w.alpha[3] * n_ag +
           w.alpha[4] * np + w.alpha[5] * ns;
}

}  // namespace

double eval_crossmodal(const GrayImage& p, const GrayImage& r, const QualityWeights& w,
                       const NssModel& model) {
    const double n_niqe = normalize_metric(w, MetricId::NIQE, niqe(p, model));
    const double n_en = normalize_metric(w, MetricId::EN, entropy(p));
    const double n_ag = normalize_metric(w, MetricId::AG, avg_gradient(p));
    return crossmodal_from_parts(n_niqe, n_en, n_ag, p, r, w, nullptr, nullptr, nullptr);
}

double eval_pair_quality(const GrayImage& x, const GrayImage& y, const GrayImage& p,
                         const QualityWeights& w, const NssModel& model) {
    const double n_niqe = normalize_metric(w, MetricId::NIQE, niqe(p, model));
    const double n_en = normalize_metric(w, MetricId::EN, entropy(p));
    const double n_ag = normalize_metric(w, MetricId::AG, avg_gradient(p));
    const double ex = crossmodal_from_parts(n_niqe, n_en, n_ag, p, x, w, nullptr, nullptr, nullptr);
    const double ey = crossmodal_from_parts(n_niqe, n_en, n_ag, p, y, w, nullptr, nullptr, nullptr);
    return (ex + ey) / 2.0;
}

CandidateReport measure_candidate(const GrayImage& x, const GrayImage& y, const GrayImage& p,
                                  const QualityWeights& w, const NssModel& model) {
    CandidateReport rep{};
    rep.niqe = niqe(p, model);
    rep.en = entropy(p);
    rep.ag = avg_gradient(p);
    const double n_niqe = normalize_metric(w, MetricId::NIQE, rep.niqe);
    const double n_en = normalize_metric(w, MetricId::EN, rep.en);
    const double n_ag = normalize_metric(w, MetricId::AG, rep.ag);
    double vx, px, sx, vy, py, sy;
    const double ex = crossmodal_from_parts(n_niqe, n_en, n_ag, p, x, w, &vx, &px, &sx);
    const double ey = crossmodal_from_parts(n_niqe, n_en, n_ag, p, y, w, &vy, &py, &sy);
    rep.e2 = (ex + ey) / 2.0;
    rep.vif = (vx + vy) / 2.0;
    rep.ssim = (sx + sy) / 2.0;
    rep.psnr = ((px + py) / 2.0) * 60.0;
    rep.mi = (mutual_information(p, x) + mutual_information(p, y)) / 2.0;
    return rep;
}

std::string evaluator_tag(EvalKind kind, const QualityWeights& w, const NssModel& model) {
    std::string bytes;
    bytes.push_back(kind == EvalKind::Supervised ? '1' : '2');
    auto put = [&bytes](double v) {
        char b[8];
        std::memcpy(b, &v, 8);
        bytes.append(b, 8);
    };
    put(w.beta);
    put(w.beta1);
    for (double a : w.alpha) put(a);
    for (const NormMap& m : w.norm) {
        bytes.push_back(m.kind == NormMap::Kind::Reciprocal ? 'R' : 'A');
        put(m.lo);
        put(m.hi);
        bytes.push_back(m.flip ? 'F' : '-');
    }
    bytes += nss_bytes(model);
    const std::string prefix = kind == EvalKind::Supervised ? "E1:" : "E2:";
    return prefix + sha256_hex(bytes).substr(0, 16);
}

Evaluator Evaluator::cross_modal(QualityWeights w, NssModel m) {
    w.validate();
    Evaluator e;
    e.kind = EvalKind::CrossModal;
    e.tag = evaluator_tag(e.kind, w, m);
    e.weights = std::move(w);
    e.model = std::move(m);
    return e;
}

Evaluator Evaluator::supervised(QualityWeights w, NssModel m) {
    w.validate();
    Evaluator e;
    e.kind = EvalKind::Supervised;
    e.tag = evaluator_tag(e.kind, w, m);
    e.weights = std::move(w);
    e.model = std::move(m);
    return e;
}

double Evaluator::score(const ImagePair& pair, const GrayImage& fused, const GrayImage* ref) const {
    if (kind == EvalKind::Supervised) {
        if (!ref)
            throw MissingReference("pair '" + pair.id + "': reference image required for this evaluator");
        return eval_supervised(fused, *ref, weights);
    }
    return eval_pair_quality(pair.a, pair.b, fused, weights, model);
}

}  // namespace aefuse
