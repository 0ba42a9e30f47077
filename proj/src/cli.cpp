#include "aefuse/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include "CLI11.hpp"

#include "aefuse/config.hpp"
#include "aefuse/manifest.hpp"
#include "aefuse/oracle.hpp"
#include "aefuse/pgm.hpp"
#include "aefuse/synthetic.hpp"
#include "aefuse/train.hpp"

namespace aefuse::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string f9(double v) { return fmt("%.9f", v); }

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot create '" + file.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoFailure("write failure on '" + file.string() + "'");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create directory '" + dir.string() + "': " + ec.message());
}

struct CommonArgs {
    std::string config_path;
    std::string manifest_path;
    std::string out_path;
    uint64_t seed = 0;
    bool seed_given = false;
};

Config make_config(const CommonArgs& a) {
    Config cfg;
    if (!a.config_path.empty()) cfg = load_config(a.config_path);
    if (a.seed_given) {
        cfg.seed = a.seed;
        cfg.train.seed = a.seed;
    }
    return cfg;
}

NssModel load_model_if_configured(const Config& cfg) {
    if (cfg.nss_model) return nss_load(*cfg.nss_model);
    return NssModel{};
}

// The cross-modal family scores through NIQE, so it cannot run without a
// fitted model; the reference family only folds the model into its tag.
Evaluator make_evaluator(const Config& cfg, bool need_model_for_panel) {
    if ((cfg.evaluator == EvalKind::CrossModal || need_model_for_panel) && !cfg.nss_model)
        throw MissingReference("evaluator needs nss.model in the config; run fit-nss first");
    NssModel model = load_model_if_configured(cfg);
    return cfg.evaluator == EvalKind::CrossModal
               ? Evaluator::cross_modal(cfg.weights, std::move(model))
               : Evaluator::supervised(cfg.weights, std::move(model));
}

std::optional<GrayImage> load_ref(const ManifestEntry& e) {
    if (!e.has_ref()) return std::nullopt;
    return load_pgm(e.path_ref);
}

fs::path cache_dir_for(const Config& cfg, const fs::path& out) {
    return cfg.cache_dir ? *cfg.cache_dir : out / "cache";
}

OracleCache load_cache_checked(const fs::path& dir) {
    if (!fs::exists(dir / "oracle.idx"))
        throw MissingOracle("no oracle cache at '" + dir.string() + "'; run oracle first");
    return cache_load(dir);
}

int cmd_fuse(const CommonArgs& a, std::ostream& out) {
    const Config cfg = make_config(a);
    const MethodRegistry reg = build_registry(cfg);
    const auto entries = load_manifest(a.manifest_path);
    const fs::path dir(a.out_path);
    ensure_dir(dir);

    std::vector<fs::path> written;
    try {
        size_t images = 0;
        for (const ManifestEntry& e : entries) {
            const ImagePair pair = load_pair(e);
            for (auto& [id, fused] : registry_fuse_all(reg, pair)) {
                const fs::path file = dir / (e.pair_id + "." + id.name + ".pgm");
                save_pgm(fused, file);
                written.push_back(file);
                ++images;
            }
        }
        out << "fuse: wrote " << images << " images for " << entries.size() << " pairs to "
            << dir.string() << "\n";
    } catch (...) {
        std::error_code ec;
        for (const fs::path& f : written) fs::remove(f, ec);
        throw;
    }
    return 0;
}

int cmd_oracle(const CommonArgs& a, std::ostream& out) {
    const Config cfg = make_config(a);
    const MethodRegistry reg = build_registry(cfg);
    const auto entries = load_manifest(a.manifest_path);
    const fs::path dir(a.out_path);
    ensure_dir(dir);

    const Evaluator ev = make_evaluator(cfg, /*need_model_for_panel=*/true);
    OracleCache cache(ev.tag);

    std::string csv = "pair_id,method,EN,AG,SSIM,VIF,NIQE,PSNR,MI,E2,selected\n";
    for (const ManifestEntry& e : entries) {
        const ImagePair pair = load_pair(e);
        const auto ref = load_ref(e);
        auto candidates = registry_fuse_all(reg, pair);
        std::vector<CandidateScore> scored;
        OptimalSolution best =
            select_optimal(pair, candidates, ev, ref ? &*ref : nullptr, &scored);
        for (const auto& [id, fused] : candidates) {
            const CandidateReport r =
                measure_candidate(pair.a, pair.b, fused, ev.weights, ev.model);
            csv += e.pair_id + "," + id.name + "," + f9(r.en) + "," + f9(r.ag) + "," +
                   f9(r.ssim) + "," + f9(r.vif) + "," + f9(r.niqe) + "," + f9(r.psnr) + "," +
                   f9(r.mi) + "," + f9(r.e2) + "," +
                   (id.name == best.method.name ? "1" : "0") + "\n";
        }
        cache.insert(std::move(best), std::move(scored));
    }
    write_text(dir / "scores.csv", csv);
    const fs::path cdir = cache_dir_for(cfg, dir);
    cache_store(cache, cdir);
    out << "oracle: selected optima for " << entries.size() << " pairs; cache at "
        << cdir.string() << "\n";
    return 0;
}

int cmd_train(const CommonArgs& a, std::ostream& out) {
    const Config cfg = make_config(a);
    const auto entries = load_manifest(a.manifest_path);
    const fs::path dir(a.out_path);
    ensure_dir(dir);

    std::vector<TrainSample> samples;
    if (cfg.train.mode != LossMode::Unsupervised) {
        const fs::path cdir = cache_dir_for(cfg, dir);
        OracleCache cache = load_cache_checked(cdir);
        const std::string tag =
            evaluator_tag(cfg.evaluator, cfg.weights, load_model_if_configured(cfg));
        if (tag != cache.evaluator_tag())
            throw CorruptIndex("evaluator tag '" + tag + "' does not match cache tag '" +
                               cache.evaluator_tag() + "'; re-run oracle");
        for (const ManifestEntry& e : entries) {
            if (!cache.has_pair(e.pair_id))
                throw MissingOracle("pair '" + e.pair_id +
                                    "' has no cached optimum; re-run oracle");
            samples.push_back({load_pair(e), cache.best(e.pair_id).fused});
        }
    } else {
        for (const ManifestEntry& e : entries) samples.push_back({load_pair(e), std::nullopt});
    }

    FusionNet net = FusionNet::random_init(cfg.train.seed);
    const std::vector<LossReport> trace = train(net, samples, cfg.train);
    net_store(net, dir / "model.aenet");

    std::string csv = "epoch,total,sup,unsup\n";
    for (const LossReport& r : trace)
        csv += std::to_string(r.epoch) + "," + f9(r.total) + "," + f9(r.term_supervised) + "," +
               f9(r.term_unsupervised) + "\n";
    write_text(dir / "trace.csv", csv);

    out << "train: " << trace.size() << " epochs over " << samples.size()
        << " pairs; final loss " << f9(trace.back().total) << "; model at "
        << (dir / "model.aenet").string() << "\n";
    return 0;
}

int cmd_evolve(const CommonArgs& a, const std::string& method_name, std::ostream& out) {
    const Config cfg = make_config(a);
    const auto entries = load_manifest(a.manifest_path);
    const fs::path dir(a.out_path);
    ensure_dir(dir);

    Config method_cfg = cfg;
    method_cfg.methods = {method_name};  // rejects unknown names
    const MethodRegistry reg = build_registry(method_cfg);
    const MethodEntry* entry = reg.find(method_name);
    if (!entry) throw TypeError("evolve: unknown method '" + method_name + "'");

    const Evaluator ev = make_evaluator(cfg, /*need_model_for_panel=*/false);
    const fs::path cdir = cache_dir_for(cfg, dir);
    OracleCache cache = load_cache_checked(cdir);

    std::string csv = "pair_id,old_score,new_score,delta,replaced\n";
    size_t replaced_count = 0;
    for (const ManifestEntry& e : entries) {
        const ImagePair pair = load_pair(e);
        const auto ref = load_ref(e);
        const double old_score = cache.best(e.pair_id).score;
        const GrayImage candidate = entry->fn(pair);
        const bool replaced =
            evolve(cache, pair, entry->id, candidate, ev, ref ? &*ref : nullptr);
        const double new_score = cache.best(e.pair_id).score;
        csv += e.pair_id + "," + f9(old_score) + "," + f9(new_score) + "," +
               f9(new_score - old_score) + "," + (replaced ? "1" : "0") + "\n";
        if (replaced) ++replaced_count;
    }
    write_text(dir / "evolve_report.csv", csv);
    cache_store(cache, cdir);
    out << "evolve: method '" << method_name << "' replaced " << replaced_count << " of "
        << entries.size() << " optima\n";
    return 0;
}

int cmd_bench(const CommonArgs& a, const std::string& model_path, std::ostream& out) {
    const Config cfg = make_config(a);
    const MethodRegistry reg = build_registry(cfg);
    const auto entries = load_manifest(a.manifest_path);
    const fs::path dir(a.out_path);
    ensure_dir(dir);

    const fs::path net_file =
        model_path.empty() ? dir / "model.aenet" : fs::path(model_path);
    if (!fs::exists(net_file))
        throw MissingOracle("no trained model at '" + net_file.string() + "'; run train first");
    const FusionNet net = net_load(net_file);
    const Evaluator ev = make_evaluator(cfg, /*need_model_for_panel=*/true);

    struct Row {
        std::string name;
        CandidateReport sum{};
        double seconds = 0.0;
    };
    std::vector<Row> rows;
    for (const MethodEntry& m : reg.entries()) rows.push_back({m.id.name, {}, 0.0});
    rows.push_back({"oracle", {}, 0.0});
    rows.push_back({"ae-net", {}, 0.0});
    const size_t oracle_row = rows.size() - 2;
    const size_t net_row = rows.size() - 1;

    using Clock = std::chrono::steady_clock;
    auto elapsed = [](Clock::time_point t0) {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    };
    auto add = [](CandidateReport& s, const CandidateReport& r) {
        s.en += r.en;
        s.ag += r.ag;
        s.ssim += r.ssim;
        s.vif += r.vif;
        s.niqe += r.niqe;
        s.psnr += r.psnr;
        s.mi += r.mi;
        s.e2 += r.e2;
    };

    for (const ManifestEntry& e : entries) {
        const ImagePair pair = load_pair(e);
        const auto ref = load_ref(e);
        std::vector<std::pair<FusionMethodId, GrayImage>> candidates;
        double fuse_seconds = 0.0;
        for (size_t i = 0; i < reg.entries().size(); ++i) {
            const auto t0 = Clock::now();
            GrayImage fused = reg.entries()[i].fn(pair);
            const double dt = elapsed(t0);
            rows[i].seconds += dt;
            fuse_seconds += dt;
            add(rows[i].sum, measure_candidate(pair.a, pair.b, fused, ev.weights, ev.model));
            candidates.emplace_back(reg.entries()[i].id, std::move(fused));
        }
        {
            const auto t0 = Clock::now();
            OptimalSolution best = select_optimal(pair, candidates, ev, ref ? &*ref : nullptr);
            rows[oracle_row].seconds += fuse_seconds + elapsed(t0);
            add(rows[oracle_row].sum,
                measure_candidate(pair.a, pair.b, best.fused, ev.weights, ev.model));
        }
        {
            const auto t0 = Clock::now();
            const GrayImage fused = net.fuse(pair.a, pair.b);
            rows[net_row].seconds += elapsed(t0);
            add(rows[net_row].sum, measure_candidate(pair.a, pair.b, fused, ev.weights, ev.model));
        }
    }

    const double inv = 1.0 / static_cast<double>(entries.size());
    std::string csv = "method,EN,AG,SSIM,VIF,NIQE,PSNR,MI,E2,seconds_per_pair\n";
    std::string md = "| method | EN | AG | SSIM | VIF | NIQE | PSNR | MI | E2 | seconds_per_pair |\n"
                     "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const Row& r : rows) {
        const std::vector<std::string> cells = {
            r.name,           f9(r.sum.en * inv),  f9(r.sum.ag * inv), f9(r.sum.ssim * inv),
            f9(r.sum.vif * inv), f9(r.sum.niqe * inv), f9(r.sum.psnr * inv), f9(r.sum.mi * inv),
            f9(r.sum.e2 * inv), fmt("%.3f", r.seconds * inv)};
        for (size_t i = 0; i < cells.size(); ++i) csv += (i ? "," : "") + cells[i];
        csv += "\n";
        md += "|";
        for (const std::string& c : cells) md += " " + c + " |";
        md += "\n";
    }
    write_text(dir / "bench.csv", csv);
    write_text(dir / "bench.md", md);
    out << "bench: " << rows.size() << " methods over " << entries.size() << " pairs; report at "
        << (dir / "bench.csv").string() << "\n";
    return 0;
}

int cmd_gen_synthetic(const CommonArgs& a, int pairs, int size, int pristine,
                      std::ostream& out) {
    if (pairs < 1) throw RangeError("gen-synthetic: --pairs must be at least 1");
    if (size < 32) throw RangeError("gen-synthetic: --size must be at least 32");
    if (pristine < 0) throw RangeError("gen-synthetic: --pristine must be non-negative");
    const Config cfg = make_config(a);
    const fs::path dir(a.out_path);
    ensure_dir(dir / "pairs");

    static constexpr Task kCycle[] = {Task::MultiExposure, Task::InfraredVisible,
                                      Task::MultiFocus, Task::Medical, Task::Cvs};
    std::vector<ManifestEntry> entries;
    for (int k = 0; k < pairs; ++k) {
        char id[32];
        std::snprintf(id, sizeof(id), "pair%03d", k);
        const Task task = kCycle[k % 5];
        const ImagePair pair = make_task_pair(id, task, size, size, cfg.seed + k);
        ManifestEntry e;
        e.pair_id = id;
        e.path_a = dir / "pairs" / (std::string(id) + "_a.pgm");
        e.path_b = dir / "pairs" / (std::string(id) + "_b.pgm");
        e.task = task;
        save_pgm(pair.a, e.path_a);
        save_pgm(pair.b, e.path_b);
        entries.push_back(std::move(e));
    }
    save_manifest(entries, dir / "manifest.csv");

    if (pristine > 0) {
        ensure_dir(dir / "pristine");
        for (int k = 0; k < pristine; ++k) {
            char name[48];
            std::snprintf(name, sizeof(name), "pristine%03d.pgm", k);
            save_pgm(make_pristine(size, size, cfg.seed + 100000 + k),
                     dir / "pristine" / name);
        }
    }
    out << "gen-synthetic: " << pairs << " pairs and " << pristine << " pristine images at "
        << dir.string() << "\n";
    return 0;
}

int cmd_fit_nss(const CommonArgs& a, const std::string& corpus, std::ostream& out) {
    const Config cfg = make_config(a);
    std::vector<fs::path> files;
    if (!fs::is_directory(corpus))
        throw IoFailure("fit-nss: corpus directory '" + corpus + "' not found");
    for (const auto& de : fs::directory_iterator(corpus))
        if (de.is_regular_file() && de.path().extension() == ".pgm")
            files.push_back(de.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw EmptyDataset("fit-nss: no .pgm files in '" + corpus + "'");

    std::vector<GrayImage> images;
    images.reserve(files.size());
    for (const fs::path& f : files) images.push_back(load_pgm(f));
    const NssModel model = niqe_fit(images, cfg.nss_patch_size, cfg.nss_sharpness_fraction);

    const fs::path out_file(a.out_path);
    if (out_file.has_parent_path()) ensure_dir(out_file.parent_path());
    nss_store(model, out_file);
    out << "fit-nss: fitted on " << images.size() << " images; model at " << out_file.string()
        << "\n";
    return 0;
}

int code_for(const std::exception& e) {
    if (dynamic_cast<const ManifestError*>(&e) || dynamic_cast<const UnknownKey*>(&e) ||
        dynamic_cast<const TypeError*>(&e) || dynamic_cast<const RangeError*>(&e))
        return 2;
    if (dynamic_cast<const IoFailure*>(&e) || dynamic_cast<const MalformedHeader*>(&e) ||
        dynamic_cast<const UnsupportedMaxval*>(&e) || dynamic_cast<const TruncatedData*>(&e) ||
        dynamic_cast<const BadMagic*>(&e) || dynamic_cast<const WrongLength*>(&e))
        return 3;
    if (dynamic_cast<const MissingOracle*>(&e) || dynamic_cast<const EmptyDataset*>(&e))
        return 5;
    if (dynamic_cast<const UnknownPair*>(&e) || dynamic_cast<const DuplicateMethodForPair*>(&e) ||
        dynamic_cast<const CorruptIndex*>(&e))
        return 6;
    if (dynamic_cast<const Error*>(&e)) return 4;
    return 1;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"grayscale image fusion engine"};
    app.require_subcommand(1);

    CommonArgs common;
    auto add_common = [&](CLI::App* sub, bool needs_manifest, const char* out_help) {
        sub->add_option("--config", common.config_path, "key=value configuration file");
        if (needs_manifest)
            sub->add_option("--manifest", common.manifest_path, "dataset manifest CSV")
                ->required();
        sub->add_option("--out", common.out_path, out_help)->required();
        sub->add_option("--seed", common.seed, "override config seeds")
            ->each([&](const std::string&) { common.seed_given = true; });
    };

    CLI::App* c_fuse = app.add_subcommand("fuse", "run every applicable operator per pair");
    add_common(c_fuse, true, "output directory for fused images");

    CLI::App* c_oracle =
        app.add_subcommand("oracle", "score candidates and cache per-pair optima");
    add_common(c_oracle, true, "output directory for scores.csv and the cache");

    CLI::App* c_train = app.add_subcommand("train", "distill the cached optima into the net");
    add_common(c_train, true, "output directory for model.aenet and trace.csv");

    CLI::App* c_evolve =
        app.add_subcommand("evolve", "fold one new method into the cached optima");
    add_common(c_evolve, true, "output directory for evolve_report.csv");
    std::string new_method;
    c_evolve->add_option("--new-method", new_method, "method name to evaluate")->required();

    CLI::App* c_bench = app.add_subcommand("bench", "metric panel for methods, oracle, and net");
    add_common(c_bench, true, "output directory for bench.csv and bench.md");
    std::string model_path;
    c_bench->add_option("--model", model_path, "trained model (default <out>/model.aenet)");

    CLI::App* c_gen = app.add_subcommand("gen-synthetic", "write a synthetic dataset");
    add_common(c_gen, false, "output directory for pairs and manifest.csv");
    int n_pairs = 10, size = 128, n_pristine = 20;
    c_gen->add_option("--pairs", n_pairs, "number of pairs");
    c_gen->add_option("--size", size, "image side length");
    c_gen->add_option("--pristine", n_pristine, "number of clean corpus images");

    CLI::App* c_fit = app.add_subcommand("fit-nss", "fit scene statistics on a clean corpus");
    add_common(c_fit, false, "output model file path");
    std::string corpus;
    c_fit->add_option("--corpus", corpus, "directory of clean .pgm images")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "AEERR:2:" << one_line(e.what()) << "\n";
        return 2;
    }

    try {
        if (c_fuse->parsed()) return cmd_fuse(common, out);
        if (c_oracle->parsed()) return cmd_oracle(common, out);
        if (c_train->parsed()) return cmd_train(common, out);
        if (c_evolve->parsed()) return cmd_evolve(common, new_method, out);
        if (c_bench->parsed()) return cmd_bench(common, model_path, out);
        if (c_gen->parsed()) return cmd_gen_synthetic(common, n_pairs, size, n_pristine, out);
        if (c_fit->parsed()) return cmd_fit_nss(common, corpus, out);
        err << "AEERR:2:no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        const int code = code_for(e);
        err << "AEERR:" << code << ":" << one_line(e.what()) << "\n";
        return code;
    }
}

}  // namespace aefuse::cli
