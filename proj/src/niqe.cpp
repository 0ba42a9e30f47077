#include "aefuse/niqe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "aefuse/filter.hpp"
#include "aefuse/kernels.hpp"

static_assert(std::endian::native == std::endian::little,
              "nss model serialization assumes a little-endian host");

namespace aefuse {
namespace {

constexpr int kFeatures = 18;
constexpr double kRegularizer = 1e-6;

double gamma_ratio21(double alpha) {
    return std::exp(std::lgamma(2.0 / alpha) - std::lgamma(1.0 / alpha));
}

// rho(alpha) = Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)) over the search grid
const std::vector<std::pair<double, double>>& rho_table() {
    static const std::vector<std::pair<double, double>> table = [] {
        std::vector<std::pair<double, double>> t;
        t.reserve(9801);
        for (int i = 0; i <= 9800; ++i) {
            double a = 0.2 + 0.001 * i;
            double rho = std::exp(2.0 * std::lgamma(2.0 / a) - std::lgamma(1.0 / a) -
                                  std::lgamma(3.0 / a));
            t.emplace_back(a, rho);
        }
        return t;
    }();
    return table;
}

struct PatchFeatures {
    std::array<double, kFeatures> f;
    double sharpness;
    size_t index;
};

void append_products(const GrayImage& m, int y0, int x0, int p, int dy, int dx,
                     std::vector<double>& out) {
    out.clear();
    for (int y = y0; y < y0 + p; ++y) {
        if (y + dy < y0 || y + dy >= y0 + p) continue;
        for (int x = x0; x < x0 + p; ++x) {
            if (x + dx < x0 || x + dx >= x0 + p) continue;
            out.push_back(m.at(y, x) * m.at(y + dy, x + dx));
        }
    }
}

std::array<double, kFeatures> patch_features(const GrayImage& mscn, int y0, int x0, int p) {
    std::array<double, kFeatures> f{};
    std::vector<double> samples;
    samples.reserve(static_cast<size_t>(p) * p);
    for (int y = y0; y < y0 + p; ++y)
        for (int x = x0; x < x0 + p; ++x) samples.push_back(mscn.at(y, x));
    const AggdFit base = aggd_fit(samples);
    f[0] = base.alpha;
    f[1] = base.sigma_sym();

    static constexpr int kDirs[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};  // H, V, D1, D2
    for (int d = 0; d < 4; ++d) {
        append_products(mscn, y0, x0, p, kDirs[d][0], kDirs[d][1], samples);
        const AggdFit fit = aggd_fit(samples);
        f[2 + 4 * d + 0] = fit.alpha;
        f[2 + 4 * d + 1] = fit.mean_param();
        f[2 + 4 * d + 2] = fit.sigma_l;
        f[2 + 4 * d + 3] = fit.sigma_r;
    }
    return f;
}

struct FeatureStats {
    std::array<double, kFeatures> mean{};
    std::array<double, 324> cov{};
};

FeatureStats feature_stats(const std::vector<std::array<double, kFeatures>>& rows,
                           bool with_cov) {
    FeatureStats s;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (int i = 0; i < kFeatures; ++i) s.mean[i] += r[i];
    for (int i = 0; i < kFeatures; ++i) s.mean[i] /= n;
    if (!with_cov || rows.size() < 2) return s;
    for (int i = 0; i < kFeatures; ++i) {
        for (int j = i; j < kFeatures; ++j) {
            double acc = 0.0;
            for (const auto& r : rows) acc += (r[i] - s.mean[i]) * (r[j] - s.mean[j]);
            double c = acc / (n - 1.0);
            s.cov[static_cast<size_t>(i) * kFeatures + j] = c;
            s.cov[static_cast<size_t>(j) * kFeatures + i] = c;
        }
    }
    return s;
}

// Solve A x = b for symmetric positive definite A via Cholesky.
std::array<double, kFeatures> spd_solve(std::array<double, 324> a,
                                        const std::array<double, kFeatures>& b) {
    std::array<double, 324> l{};
    for (int i = 0; i < kFeatures; ++i) {
        for (int j = 0; j <= i; ++j) {
            double acc = a[static_cast<size_t>(i) * kFeatures + j];
            for (int k = 0; k < j; ++k)
                acc -= l[static_cast<size_t>(i) * kFeatures + k] *
                       l[static_cast<size_t>(j) * kFeatures + k];
            if (i == j) {
                if (acc <= 0.0)
                    throw SingularCovariance("covariance not positive definite after regularization");
                l[static_cast<size_t>(i) * kFeatures + i] = std::sqrt(acc);
            } else {
                l[static_cast<size_t>(i) * kFeatures + j] =
                    acc / l[static_cast<size_t>(j) * kFeatures + j];
            }
        }
    }
    std::array<double, kFeatures> y{};
    for (int i = 0; i < kFeatures; ++i) {
        double acc = b[i];
        for (int k = 0; k < i; ++k) acc -= l[static_cast<size_t>(i) * kFeatures + k] * y[k];
        y[i] = acc / l[static_cast<size_t>(i) * kFeatures + i];
    }
    std::array<double, kFeatures> x{};
    for (int i = kFeatures - 1; i >= 0; --i) {
        double acc = y[i];
        for (int k = i + 1; k < kFeatures; ++k)
            acc -= l[static_cast<size_t>(k) * kFeatures + i] * x[k];
        x[i] = acc / l[static_cast<size_t>(i) * kFeatures + i];
    }
    return x;
}

void put_u32(std::string& out, uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

void put_f64(std::string& out, double v) {
    char b[8];
    std::memcpy(b, &v, 8);
    out.append(b, 8);
}

}  // namespace

double AggdFit::mean_param() const { return (sigma_r - sigma_l) * gamma_ratio21(alpha); }

double AggdFit::sigma_sym() const {
    return std::sqrt((sigma_l * sigma_l + sigma_r * sigma_r) / 2.0);
}

AggdFit aggd_fit(const std::vector<double>& samples) {
    double abs_sum = 0.0, sq_sum = 0.0;
    double neg_sq = 0.0, pos_sq = 0.0;
    size_t nn = 0, np = 0;
    for (double v : samples) {
        abs_sum += std::fabs(v);
        sq_sum += v * v;
        if (v < 0.0) {
            neg_sq += v * v;
            ++nn;
        } else if (v > 0.0) {
            pos_sq += v * v;
            ++np;
        }
    }
    const double n = static_cast<double>(samples.size());
    if (samples.empty() || sq_sum == 0.0) return {0.2, 0.0, 0.0};

    const double sigma_l = nn ? std::sqrt(neg_sq / static_cast<double>(nn)) : 0.0;
    const double sigma_r = np ? std::sqrt(pos_sq / static_cast<double>(np)) : 0.0;
    const double rhat = (abs_sum / n) * (abs_sum / n) / (sq_sum / n);
    double target;
    if (sigma_r == 0.0) {
        target = rhat;  // one-sided mass; the asymmetry correction tends to 1
    } else {
        const double gh = sigma_l / sigma_r;
        target = rhat * (gh * gh * gh + 1.0) * (gh + 1.0) /
                 ((gh * gh + 1.0) * (gh * gh + 1.0));
    }

    double best_alpha = rho_table().front().first;
    double best_err = std::numeric_limits<double>::infinity();
    for (const auto& [alpha, rho] : rho_table()) {
        const double e = (rho - target) * (rho - target);
        if (e < best_err) {
            best_err = e;
            best_alpha = alpha;
        }
    }
    return {best_alpha, sigma_l, sigma_r};
}

GrayImage mscn_field(const GrayImage& img) {
    const std::vector<double> taps = gaussian_taps(3, 7.0 / 6.0);
    const size_t n = img.size();
    const GrayImage mu = separable_blur(img, taps);
    GrayImage sq(img.width(), img.height());
    kernels::mul(img.data(), img.data(), sq.data(), n);
    const GrayImage m2 = separable_blur(sq, taps);
    GrayImage out(img.width(), img.height());
    constexpr double C = 1.0 / 255.0;
    for (size_t i = 0; i < n; ++i) {
        const double m = mu.data()[i];
        const double var = std::max(m2.data()[i] - m * m, 0.0);
        out.data()[i] = (img.data()[i] - m) / (std::sqrt(var) + C);
    }
    return out;
}

NssModel niqe_fit(const std::vector<GrayImage>& corpus, uint32_t patch_size,
                  double sharpness_fraction) {
    if (patch_size < 16) throw RangeError("nss fit: patch_size must be >= 16");
    if (!(sharpness_fraction > 0.0 && sharpness_fraction <= 1.0))
        throw RangeError("nss fit: sharpness_fraction must be in (0,1]");
    const int p = static_cast<int>(patch_size);

    std::vector<PatchFeatures> patches;
    for (size_t idx = 0; idx < corpus.size(); ++idx) {
        const GrayImage& img = corpus[idx];
        if (img.width() < p || img.height() < p)
            throw ImageTooSmall("nss fit: corpus image " + std::to_string(idx) +
                                " smaller than patch size");
        const std::vector<double> taps = gaussian_taps(3, 7.0 / 6.0);
        const GrayImage mu = separable_blur(img, taps);
        GrayImage sq(img.width(), img.height());
        kernels::mul(img.data(), img.data(), sq.data(), img.size());
        const GrayImage m2 = separable_blur(sq, taps);
        const GrayImage mscn = mscn_field(img);

        for (int y0 = 0; y0 + p <= img.height(); y0 += p) {
            for (int x0 = 0; x0 + p <= img.width(); x0 += p) {
                double sharp = 0.0;
                for (int y = y0; y < y0 + p; ++y)
                    for (int x = x0; x < x0 + p; ++x) {
                        const double m = mu.at(y, x);
                        sharp += std::max(m2.at(y, x) - m * m, 0.0);
                    }
                patches.push_back({patch_features(mscn, y0, x0, p), sharp, patches.size()});
            }
        }
    }
    if (patches.size() < 36)
        throw InsufficientPatches("nss fit: need at least 36 patches, got " +
                                  std::to_string(patches.size()));

    std::stable_sort(patches.begin(), patches.end(),
                     [](const PatchFeatures& a, const PatchFeatures& b) {
                         return a.sharpness > b.sharpness;
                     });
    const size_t keep = std::max<size_t>(
        1, static_cast<size_t>(std::llround(sharpness_fraction * static_cast<double>(patches.size()))));
    // pool the kept patches in corpus order; the scoring path pools the same way
    std::vector<PatchFeatures> kept(
        patches.begin(), patches.begin() + static_cast<ptrdiff_t>(std::min(keep, patches.size())));
    std::sort(kept.begin(), kept.end(),
              [](const PatchFeatures& a, const PatchFeatures& b) { return a.index < b.index; });
    std::vector<std::array<double, kFeatures>> rows;
    rows.reserve(kept.size());
    for (const PatchFeatures& pf : kept) rows.push_back(pf.f);

    const FeatureStats stats = feature_stats(rows, true);
    NssModel m;
    m.patch_size = patch_size;
    m.sharpness_fraction = sharpness_fraction;
    m.mean = stats.mean;
    m.cov = stats.cov;
    return m;
}

double mvg_distance(const std::array<double, 18>& mean1, const std::array<double, 324>& cov1,
                    const std::array<double, 18>& mean2, const std::array<double, 324>& cov2) {
    std::array<double, 324> a{};
    for (size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (cov1[i] + cov2[i]);
    for (int i = 0; i < kFeatures; ++i) a[static_cast<size_t>(i) * kFeatures + i] += kRegularizer;
    std::array<double, kFeatures> diff{};
    for (int i = 0; i < kFeatures; ++i) diff[i] = mean1[i] - mean2[i];
    const std::array<double, kFeatures> x = spd_solve(a, diff);
    double q = 0.0;
    for (int i = 0; i < kFeatures; ++i) q += diff[i] * x[i];
    return std::sqrt(std::max(q, 0.0));
}

double niqe(const GrayImage& img, const NssModel& model) {
    const int p = static_cast<int>(model.patch_size);
    if (img.width() < p || img.height() < p)
        throw ImageTooSmall("niqe: image smaller than model patch size " + std::to_string(p));
    const GrayImage mscn = mscn_field(img);
    std::vector<std::array<double, kFeatures>> rows;
    for (int y0 = 0; y0 + p <= img.height(); y0 += p)
        for (int x0 = 0; x0 + p <= img.width(); x0 += p)
            rows.push_back(patch_features(mscn, y0, x0, p));

    const bool own_cov = rows.size() >= 19;
    const FeatureStats stats = feature_stats(rows, own_cov);
    return mvg_distance(model.mean, model.cov, stats.mean, own_cov ? stats.cov : model.cov);
}

std::string nss_bytes(const NssModel& m) {
    std::string out = "NSSM1";
    put_u32(out, m.patch_size);
    put_f64(out, m.sharpness_fraction);
    for (double v : m.mean) put_f64(out, v);
    for (double v : m.cov) put_f64(out, v);
    return out;
}

void nss_store(const NssModel& m, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("nss model: cannot create '" + file.string() + "'");
    const std::string bytes = nss_bytes(m);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoFailure("nss model: write failure on '" + file.string() + "'");
}

NssModel nss_load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoFailure("nss model: cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();
    constexpr size_t kLen = 5 + 4 + 8 + 18 * 8 + 324 * 8;
    if (buf.size() < 5 || buf.compare(0, 5, "NSSM1") != 0)
        throw BadMagic("nss model: bad magic in '" + file.string() + "'");
    if (buf.size() != kLen)
        throw WrongLength("nss model: expected " + std::to_string(kLen) + " bytes, got " +
                          std::to_string(buf.size()));
    NssModel m;
    size_t pos = 5;
    std::memcpy(&m.patch_size, buf.data() + pos, 4);
    pos += 4;
    std::memcpy(&m.sharpness_fraction, buf.data() + pos, 8);
    pos += 8;
    for (double& v : m.mean) {
        std::memcpy(&v, buf.data() + pos, 8);
        pos += 8;
    }
    for (double& v : m.cov) {
        std::memcpy(&v, buf.data() + pos, 8);
        pos += 8;
    }
    return m;
}

}  // namespace aefuse
