#include "aefuse/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace aefuse {
namespace {

struct Entry {
    int line;
    std::string key;
    std::string value;
};

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        std::string item = trim(s.substr(start, comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        start = comma + 1;
    }
    return out;
}

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> names{"avg", "maxsel", "lp", "rp", "tsal"};
    return names;
}

class Parser {
public:
    Parser(std::istream& in, std::string origin) : origin_(std::move(origin)) {
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            size_t hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            line = trim(line);
            if (line.empty()) continue;
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw TypeError(where(lineno) + ": expected key = value");
            Entry e{lineno, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
            if (e.key.empty()) throw TypeError(where(lineno) + ": empty key");
            entries_.push_back(std::move(e));
        }
    }

    Config run() {
        Config cfg;
        for (const Entry& e : entries_) apply(cfg, e);
        cfg.weights.validate();
        cfg.train.validate();
        if (cfg.nss_patch_size < 16)
            throw RangeError(origin_ + ": nss.patch_size must be at least 16");
        if (!(cfg.nss_sharpness_fraction > 0.0) || cfg.nss_sharpness_fraction > 1.0)
            throw RangeError(origin_ + ": nss.sharpness_fraction must be in (0,1]");
        return cfg;
    }

private:
    std::string where(int line) const { return origin_ + ":" + std::to_string(line); }

    double to_double(const Entry& e) const {
        try {
            size_t used = 0;
            double v = std::stod(e.value, &used);
            if (used != e.value.size()) throw std::invalid_argument(e.value);
            return v;
        } catch (const std::exception&) {
            throw TypeError(where(e.line) + ": '" + e.key + "' needs a number, got '" +
                            e.value + "'");
        }
    }

    long long to_int(const Entry& e) const {
        try {
            size_t used = 0;
            long long v = std::stoll(e.value, &used);
            if (used != e.value.size()) throw std::invalid_argument(e.value);
            return v;
        } catch (const std::exception&) {
            throw TypeError(where(e.line) + ": '" + e.key + "' needs an integer, got '" +
                            e.value + "'");
        }
    }

    uint64_t to_u64(const Entry& e) const {
        try {
            size_t used = 0;
            unsigned long long v = std::stoull(e.value, &used);
            if (used != e.value.size() || e.value[0] == '-')
                throw std::invalid_argument(e.value);
            return v;
        } catch (const std::exception&) {
            throw TypeError(where(e.line) + ": '" + e.key +
                            "' needs a non-negative integer, got '" + e.value + "'");
        }
    }

    bool to_bool(const Entry& e) const {
        if (e.value == "true" || e.value == "1") return true;
        if (e.value == "false" || e.value == "0") return false;
        throw TypeError(where(e.line) + ": '" + e.key + "' needs true or false, got '" +
                        e.value + "'");
    }

    MetricId metric_from(const Entry& e, const std::string& token) const {
        if (token == "en") return MetricId::EN;
        if (token == "ag") return MetricId::AG;
        if (token == "ssim") return MetricId::SSIM;
        if (token == "vif") return MetricId::VIF;
        if (token == "niqe") return MetricId::NIQE;
        if (token == "psnr") return MetricId::PSNR;
        if (token == "mi") return MetricId::MI;
        throw UnknownKey(where(e.line) + ": unknown metric '" + token + "' in '" + e.key + "'");
    }

    void apply_norm(Config& cfg, const Entry& e, const std::string& metric,
                    const std::string& field) {
        NormMap& nm = cfg.weights.norm_for(metric_from(e, metric));
        if (field == "lo") {
            nm.lo = to_double(e);
            nm.kind = NormMap::Kind::AffineClamp;
        } else if (field == "hi") {
            nm.hi = to_double(e);
            nm.kind = NormMap::Kind::AffineClamp;
        } else if (field == "flip") {
            nm.flip = to_bool(e);
            nm.kind = NormMap::Kind::AffineClamp;
        } else if (field == "kind") {
            if (e.value == "affine") nm.kind = NormMap::Kind::AffineClamp;
            else if (e.value == "reciprocal") nm.kind = NormMap::Kind::Reciprocal;
            else
                throw TypeError(where(e.line) + ": '" + e.key +
                                "' needs affine or reciprocal, got '" + e.value + "'");
        } else {
            throw UnknownKey(where(e.line) + ": unknown key '" + e.key + "'");
        }
    }

    void apply_registry(Config& cfg, const Entry& e, const std::string& rest) {
        if (rest == "methods") {
            cfg.methods = split_list(e.value);
            if (cfg.methods.empty())
                throw RangeError(where(e.line) + ": registry.methods must not be empty");
            for (const std::string& m : cfg.methods)
                if (std::find(known_methods().begin(), known_methods().end(), m) ==
                    known_methods().end())
                    throw TypeError(where(e.line) + ": unknown method '" + m + "'");
            return;
        }
        size_t dot = rest.find('.');
        if (dot == std::string::npos)
            throw UnknownKey(where(e.line) + ": unknown key '" + e.key + "'");
        const std::string name = rest.substr(0, dot);
        const std::string field = rest.substr(dot + 1);
        if (std::find(known_methods().begin(), known_methods().end(), name) ==
            known_methods().end())
            throw UnknownKey(where(e.line) + ": unknown method '" + name + "' in '" + e.key +
                             "'");
        MethodParams& mp = cfg.method_params[name];
        if (field == "weight") {
            mp.weight = to_double(e);
        } else if (field == "radius") {
            long long v = to_int(e);
            if (v < 1) throw RangeError(where(e.line) + ": '" + e.key + "' must be at least 1");
            mp.radius = static_cast<int>(v);
        } else if (field == "levels") {
            long long v = to_int(e);
            if (v < 2) throw RangeError(where(e.line) + ": '" + e.key + "' must be at least 2");
            mp.levels = static_cast<int>(v);
        } else if (field == "tasks") {
            std::vector<Task> tasks;
            for (const std::string& t : split_list(e.value)) {
                try {
                    tasks.push_back(parse_task(t));
                } catch (const ManifestError&) {
                    throw TypeError(where(e.line) + ": unknown task '" + t + "'");
                }
            }
            if (tasks.empty())
                throw RangeError(where(e.line) + ": '" + e.key + "' must not be empty");
            mp.tasks = std::move(tasks);
        } else {
            throw UnknownKey(where(e.line) + ": unknown key '" + e.key + "'");
        }
    }

    void apply(Config& cfg, const Entry& e) {
        const std::string& k = e.key;
        if (k == "evaluator") {
            if (e.value == "e1") cfg.evaluator = EvalKind::Supervised;
            else if (e.value == "e2") cfg.evaluator = EvalKind::CrossModal;
            else
                throw TypeError(where(e.line) + ": evaluator needs e1 or e2, got '" + e.value +
                                "'");
        } else if (k == "weights.beta") {
            cfg.weights.beta = to_double(e);
        } else if (k == "weights.beta1") {
            cfg.weights.beta1 = to_double(e);
        } else if (k.rfind("weights.alpha", 0) == 0 && k.size() == 14 && k[13] >= '0' &&
                   k[13] <= '5') {
            cfg.weights.alpha[k[13] - '0'] = to_double(e);
        } else if (k.rfind("norm.", 0) == 0) {
            const std::string rest = k.substr(5);
            size_t dot = rest.find('.');
            if (dot == std::string::npos)
                throw UnknownKey(where(e.line) + ": unknown key '" + k + "'");
            apply_norm(cfg, e, rest.substr(0, dot), rest.substr(dot + 1));
        } else if (k == "nss.model") {
            cfg.nss_model = std::filesystem::path(e.value);
        } else if (k == "nss.patch_size") {
            long long v = to_int(e);
            if (v < 1) throw RangeError(where(e.line) + ": nss.patch_size must be positive");
            cfg.nss_patch_size = static_cast<uint32_t>(v);
        } else if (k == "nss.sharpness_fraction") {
            cfg.nss_sharpness_fraction = to_double(e);
        } else if (k.rfind("registry.", 0) == 0) {
            apply_registry(cfg, e, k.substr(9));
        } else if (k == "train.batch_size") {
            cfg.train.batch_size = static_cast<int>(to_int(e));
        } else if (k == "train.epochs") {
            cfg.train.epochs = static_cast<int>(to_int(e));
        } else if (k == "train.learning_rate") {
            cfg.train.learning_rate = to_double(e);
        } else if (k == "train.crop_size") {
            cfg.train.crop_size = static_cast<int>(to_int(e));
        } else if (k == "train.momentum") {
            cfg.train.momentum = to_double(e);
        } else if (k == "train.loss_mode") {
            try {
                cfg.train.mode = parse_loss_mode(e.value);
            } catch (const TypeError&) {
                throw TypeError(where(e.line) + ": unknown loss mode '" + e.value + "'");
            }
        } else if (k == "train.seed") {
            cfg.train.seed = to_u64(e);
        } else if (k == "cache.dir") {
            cfg.cache_dir = std::filesystem::path(e.value);
        } else if (k == "seed") {
            cfg.seed = to_u64(e);
        } else {
            throw UnknownKey(where(e.line) + ": unknown key '" + k + "'");
        }
    }

    std::string origin_;
    std::vector<Entry> entries_;
};

}  // namespace

Config parse_config(std::istream& in, const std::string& origin) {
    return Parser(in, origin).run();
}

Config load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoFailure("config: cannot open '" + file.string() + "'");
    return parse_config(in, file.string());
}

MethodRegistry build_registry(const Config& cfg) {
    std::vector<std::string> names = cfg.methods.empty() ? known_methods() : cfg.methods;

    auto tasks_for = [&](const std::string& name) -> std::set<Task> {
        auto it = cfg.method_params.find(name);
        if (it != cfg.method_params.end() && it->second.tasks)
            return std::set<Task>(it->second.tasks->begin(), it->second.tasks->end());
        return all_tasks();
    };
    auto params_for = [&](const std::string& name) -> MethodParams {
        auto it = cfg.method_params.find(name);
        return it == cfg.method_params.end() ? MethodParams{} : it->second;
    };

    MethodRegistry reg;
    for (const std::string& name : names) {
        const MethodParams p = params_for(name);
        if (name == "avg") {
            const double w = p.weight.value_or(0.5);
            reg.add({"avg"}, tasks_for(name),
                    [w](const ImagePair& pr) { return fuse_average(pr, w); });
        } else if (name == "maxsel") {
            const int r = p.radius.value_or(3);
            reg.add({"maxsel"}, tasks_for(name),
                    [r](const ImagePair& pr) { return fuse_max_energy(pr, r); });
        } else if (name == "lp") {
            const int lv = p.levels.value_or(4);
            reg.add({"lp"}, tasks_for(name),
                    [lv](const ImagePair& pr) { return fuse_laplacian_pyramid(pr, lv); });
        } else if (name == "rp") {
            const int lv = p.levels.value_or(4);
            reg.add({"rp"}, tasks_for(name),
                    [lv](const ImagePair& pr) { return fuse_ratio_pyramid(pr, lv); });
        } else if (name == "tsal") {
            reg.add({"tsal"}, tasks_for(name),
                    [](const ImagePair& pr) { return fuse_two_scale_saliency(pr); });
        }
    }
    return reg;
}

}  // namespace aefuse
