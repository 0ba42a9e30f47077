#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aefuse/cli.hpp"
#include "doctest.h"
#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int rc;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int rc = aefuse::cli::run_command(args, out, err);
    return {rc, out.str(), err.str()};
}

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& f, const std::string& text) {
    std::ofstream out(f, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

size_t count_files(const fs::path& dir, const std::string& ext) {
    size_t n = 0;
    for (const auto& de : fs::directory_iterator(dir))
        if (de.is_regular_file() && de.path().extension() == ext) ++n;
    return n;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& f) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(f));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        size_t start = 0;
        while (start <= line.size()) {
            size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

void expect_aeerr(const RunResult& r, int code) {
    CHECK(r.rc == code);
    const std::string prefix = "AEERR:" + std::to_string(code) + ":";
    CAPTURE(r.err);
    CHECK(r.err.rfind(prefix, 0) == 0);
    CHECK(r.err.find('\n') == r.err.size() - 1);  // exactly one line
}

}  // namespace

TEST_CASE("cli pipeline runs end to end") {
    testutil::TempDir base("cli_pipeline");
    const fs::path data = base.path / "data";
    const std::string manifest = (data / "manifest.csv").string();

    // dataset
    auto gen = run({"gen-synthetic", "--out", data.string(), "--pairs", "3", "--size", "48",
                    "--pristine", "12", "--seed", "5"});
    CAPTURE(gen.err);
    REQUIRE(gen.rc == 0);
    CHECK(fs::exists(data / "manifest.csv"));
    CHECK(count_files(data / "pairs", ".pgm") == 6);
    CHECK(count_files(data / "pristine", ".pgm") == 12);

    // scene statistics
    const fs::path cfg_fit = base.path / "fit.cfg";
    spit(cfg_fit, "nss.patch_size = 24\nnss.sharpness_fraction = 0.8\n");
    const fs::path model_nss = base.path / "model.nss";
    auto fit = run({"fit-nss", "--config", cfg_fit.string(), "--corpus",
                    (data / "pristine").string(), "--out", model_nss.string()});
    CAPTURE(fit.err);
    REQUIRE(fit.rc == 0);
    CHECK(fs::file_size(model_nss) == 2753);

    // shared config for the scoring stages
    const fs::path cache = base.path / "cache";
    const fs::path cfg = base.path / "run.cfg";
    spit(cfg, "nss.model = " + model_nss.string() +
                  "\n"
                  "nss.patch_size = 24\n"
                  "nss.sharpness_fraction = 0.8\n"
                  "cache.dir = " +
                  cache.string() +
                  "\n"
                  "train.epochs = 2\n"
                  "train.crop_size = 16\n"
                  "train.batch_size = 2\n");

    // fuse twice; output bytes must not depend on the run
    const fs::path fused = base.path / "fused";
    auto f1 = run({"fuse", "--config", cfg.string(), "--manifest", manifest, "--out",
                   fused.string()});
    CAPTURE(f1.err);
    REQUIRE(f1.rc == 0);
    CHECK(count_files(fused, ".pgm") == 15);
    CHECK(fs::exists(fused / "pair000.avg.pgm"));
    CHECK(fs::exists(fused / "pair002.tsal.pgm"));

    const fs::path fused2 = base.path / "fused2";
    REQUIRE(run({"fuse", "--config", cfg.string(), "--manifest", manifest, "--out",
                 fused2.string()})
                .rc == 0);
    for (const auto& de : fs::directory_iterator(fused))
        CHECK(slurp(de.path()) == slurp(fused2 / de.path().filename()));

    // oracle selection
    const fs::path orc = base.path / "orc";
    auto orun = run({"oracle", "--config", cfg.string(), "--manifest", manifest, "--out",
                     orc.string()});
    CAPTURE(orun.err);
    REQUIRE(orun.rc == 0);
    CHECK(fs::exists(cache / "oracle.idx"));
    CHECK(fs::exists(cache / "oracle.cand.tsv"));
    CHECK(fs::exists(cache / "pair001.optimal.pgm"));

    const auto scores = read_csv(orc / "scores.csv");
    REQUIRE(scores.size() == 16);  // header + 3 pairs x 5 methods
    CHECK(scores[0] == std::vector<std::string>{"pair_id", "method", "EN", "AG", "SSIM", "VIF",
                                                "NIQE", "PSNR", "MI", "E2", "selected"});
    std::map<std::string, int> selected_count;
    std::map<std::string, double> selected_e2, max_e2;
    for (size_t i = 1; i < scores.size(); ++i) {
        REQUIRE(scores[i].size() == 11);
        const std::string& pair_id = scores[i][0];
        const double e2 = std::stod(scores[i][9]);
        if (!max_e2.contains(pair_id) || e2 > max_e2[pair_id]) max_e2[pair_id] = e2;
        if (scores[i][10] == "1") {
            selected_count[pair_id]++;
            selected_e2[pair_id] = e2;
        }
    }
    REQUIRE(selected_count.size() == 3);
    for (const auto& [pair_id, n] : selected_count) {
        CAPTURE(pair_id);
        CHECK(n == 1);
        CHECK(selected_e2[pair_id] >= max_e2[pair_id] - 1e-9);
    }

    // distillation
    const fs::path tr = base.path / "tr";
    auto trun = run({"train", "--config", cfg.string(), "--manifest", manifest, "--out",
                     tr.string()});
    CAPTURE(trun.err);
    REQUIRE(trun.rc == 0);
    CHECK(fs::file_size(tr / "model.aenet") == 6478);
    const auto trace = read_csv(tr / "trace.csv");
    REQUIRE(trace.size() == 3);  // header + 2 epochs
    CHECK(trace[0] == std::vector<std::string>{"epoch", "total", "sup", "unsup"});
    CHECK(trace[1][0] == "1");
    CHECK(trace[2][0] == "2");

    // panel
    const fs::path bn = base.path / "bn";
    auto brun = run({"bench", "--config", cfg.string(), "--manifest", manifest, "--out",
                     bn.string(), "--model", (tr / "model.aenet").string()});
    CAPTURE(brun.err);
    REQUIRE(brun.rc == 0);
    const auto bench = read_csv(bn / "bench.csv");
    REQUIRE(bench.size() == 8);  // header + 5 methods + oracle + ae-net
    CHECK(bench[0][0] == "method");
    CHECK(bench[6][0] == "oracle");
    CHECK(bench[7][0] == "ae-net");
    const double oracle_e2 = std::stod(bench[6][8]);
    for (size_t i = 1; i <= 5; ++i) {
        CAPTURE(bench[i][0]);
        CHECK(oracle_e2 >= std::stod(bench[i][8]) - 1e-9);
    }
    CHECK(fs::exists(bn / "bench.md"));

    // evolving an already cached method is refused
    auto dup = run({"evolve", "--config", cfg.string(), "--manifest", manifest, "--out",
                    (base.path / "ev_dup").string(), "--new-method", "avg"});
    expect_aeerr(dup, 6);

    // a fresh cache built from a subset leaves room to evolve
    const fs::path cache2 = base.path / "cache2";
    const fs::path cfg_sub = base.path / "subset.cfg";
    spit(cfg_sub, "nss.model = " + model_nss.string() +
                      "\n"
                      "nss.patch_size = 24\n"
                      "nss.sharpness_fraction = 0.8\n"
                      "cache.dir = " +
                      cache2.string() +
                      "\n"
                      "registry.methods = avg, maxsel, tsal\n");
    REQUIRE(run({"oracle", "--config", cfg_sub.string(), "--manifest", manifest, "--out",
                 (base.path / "orc2").string()})
                .rc == 0);

    const fs::path ev = base.path / "ev";
    auto erun = run({"evolve", "--config", cfg_sub.string(), "--manifest", manifest, "--out",
                     ev.string(), "--new-method", "lp"});
    CAPTURE(erun.err);
    REQUIRE(erun.rc == 0);
    const auto report = read_csv(ev / "evolve_report.csv");
    REQUIRE(report.size() == 4);  // header + 3 pairs
    CHECK(report[0] ==
          std::vector<std::string>{"pair_id", "old_score", "new_score", "delta", "replaced"});
    for (size_t i = 1; i < report.size(); ++i) {
        const double old_score = std::stod(report[i][1]);
        const double new_score = std::stod(report[i][2]);
        CHECK(new_score >= old_score);  // the optimum never regresses
        CHECK(report[i][4] == ((new_score > old_score) ? "1" : "0"));
    }

    // the same method cannot be folded in twice
    expect_aeerr(run({"evolve", "--config", cfg_sub.string(), "--manifest", manifest, "--out",
                      ev.string(), "--new-method", "lp"}),
                 6);

    // changed weights invalidate the cache for train
    const fs::path cfg_w = base.path / "reweighted.cfg";
    spit(cfg_w, "nss.model = " + model_nss.string() +
                    "\n"
                    "nss.patch_size = 24\n"
                    "nss.sharpness_fraction = 0.8\n"
                    "cache.dir = " +
                    cache.string() +
                    "\n"
                    "weights.alpha0 = 0.9\n"
                    "train.epochs = 1\n"
                    "train.crop_size = 16\n");
    expect_aeerr(run({"train", "--config", cfg_w.string(), "--manifest", manifest, "--out",
                      (base.path / "tr2").string()}),
                 6);
}

TEST_CASE("cli help and argument errors") {
    auto help = run({"--help"});
    CHECK(help.rc == 0);
    CHECK(help.out.find("fuse") != std::string::npos);
    CHECK(help.out.find("gen-synthetic") != std::string::npos);
    CHECK(help.err.empty());

    expect_aeerr(run({}), 2);                                   // a subcommand is required
    expect_aeerr(run({"fuse", "--out", "x"}), 2);               // --manifest is required
    expect_aeerr(run({"fuse", "--manifest", "m", "--out", "x", "--bogus"}), 2);
    expect_aeerr(run({"evolve", "--manifest", "m", "--out", "x"}), 2);  // --new-method
}

TEST_CASE("cli maps failures onto stable exit codes") {
    testutil::TempDir base("cli_errors");
    const fs::path data = base.path / "data";
    REQUIRE(run({"gen-synthetic", "--out", data.string(), "--pairs", "1", "--size", "48",
                 "--pristine", "0"})
                .rc == 0);
    const std::string manifest = (data / "manifest.csv").string();

    // config problems are exit 2
    const fs::path bad_key = base.path / "bad_key.cfg";
    spit(bad_key, "bogus.key = 1\n");
    expect_aeerr(run({"fuse", "--config", bad_key.string(), "--manifest", manifest, "--out",
                      (base.path / "o1").string()}),
                 2);

    const fs::path bad_value = base.path / "bad_value.cfg";
    spit(bad_value, "train.epochs = soon\n");
    expect_aeerr(run({"fuse", "--config", bad_value.string(), "--manifest", manifest, "--out",
                      (base.path / "o2").string()}),
                 2);

    // a missing config file is an io failure, exit 3
    expect_aeerr(run({"fuse", "--config", (base.path / "absent.cfg").string(), "--manifest",
                      manifest, "--out", (base.path / "o3").string()}),
                 3);

    // manifest problems are exit 2
    const fs::path bad_manifest = base.path / "bad.csv";
    spit(bad_manifest, "pair_id,path_a,path_b,path_ref,task\npx,gone.pgm,gone.pgm,,unknown\n");
    expect_aeerr(run({"fuse", "--manifest", bad_manifest.string(), "--out",
                      (base.path / "o4").string()}),
                 2);

    // gen-synthetic validates its numbers
    expect_aeerr(run({"gen-synthetic", "--out", (base.path / "o5").string(), "--size", "16"}),
                 2);
    expect_aeerr(run({"gen-synthetic", "--out", (base.path / "o6").string(), "--pairs", "0"}),
                 2);

    // scoring without a fitted model is a usage error, exit 4
    expect_aeerr(run({"oracle", "--manifest", manifest, "--out",
                      (base.path / "o7").string()}),
                 4);

    // training without a cache is exit 5
    const fs::path cfg_fit = base.path / "fit.cfg";
    spit(cfg_fit, "nss.patch_size = 24\nnss.sharpness_fraction = 0.8\n");
    expect_aeerr(run({"train", "--config", cfg_fit.string(), "--manifest", manifest, "--out",
                      (base.path / "o8").string()}),
                 5);

    // bench without a trained model is exit 5
    expect_aeerr(run({"bench", "--config", cfg_fit.string(), "--manifest", manifest, "--out",
                      (base.path / "o9").string()}),
                 5);

    // fit-nss corpus problems
    expect_aeerr(run({"fit-nss", "--corpus", (base.path / "nowhere").string(), "--out",
                      (base.path / "m.nss").string()}),
                 3);
    const fs::path empty_dir = base.path / "empty";
    fs::create_directories(empty_dir);
    expect_aeerr(run({"fit-nss", "--corpus", empty_dir.string(), "--out",
                      (base.path / "m.nss").string()}),
                 5);

    // evolve rejects unknown method names before touching the cache
    expect_aeerr(run({"evolve", "--manifest", manifest, "--out",
                      (base.path / "o10").string(), "--new-method", "mystery"}),
                 2);
}
