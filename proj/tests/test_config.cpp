#include <fstream>
#include <sstream>
#include <string>

#include "aefuse/config.hpp"
#include "aefuse/errors.hpp"
#include "aefuse/manifest.hpp"
#include "aefuse/pgm.hpp"
#include "aefuse/synthetic.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aefuse;

namespace {

Config parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

template <class E>
std::string message_of(const std::string& text) {
    try {
        parse(text);
    } catch (const E& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("empty config yields the documented defaults") {
    const Config cfg = parse("");
    CHECK(cfg.evaluator == EvalKind::CrossModal);
    CHECK(cfg.weights.beta == 0.5);
    CHECK(cfg.weights.beta1 == 0.5);
    CHECK_FALSE(cfg.nss_model.has_value());
    CHECK(cfg.nss_patch_size == 96);
    CHECK(cfg.nss_sharpness_fraction == 0.75);
    CHECK(cfg.methods.empty());
    CHECK(cfg.train.batch_size == 5);
    CHECK(cfg.train.epochs == 50);
    CHECK(cfg.train.learning_rate == 1e-5);
    CHECK(cfg.train.crop_size == 128);
    CHECK(cfg.train.momentum == 0.9);
    CHECK(cfg.train.mode == LossMode::SemiSupervised);
    CHECK_FALSE(cfg.cache_dir.has_value());
    CHECK(cfg.seed == 0);
}

TEST_CASE("every key applies") {
    const Config cfg = parse(
        "evaluator = e1\n"
        "weights.beta = 0.7\n"
        "weights.beta1 = 0.3\n"
        "weights.alpha0 = 0.4\n"
        "weights.alpha5 = 0.05\n"
        "norm.ag.hi = 25\n"
        "norm.psnr.lo = 10\n"
        "norm.mi.flip = true\n"
        "norm.niqe.kind = affine\n"
        "norm.en.kind = reciprocal\n"
        "nss.model = models/ref.nss\n"
        "nss.patch_size = 32\n"
        "nss.sharpness_fraction = 0.5\n"
        "registry.methods = avg, lp ,tsal\n"
        "registry.avg.weight = 0.75\n"
        "registry.lp.levels = 3\n"
        "registry.lp.tasks = multifocus, medical\n"
        "train.batch_size = 2\n"
        "train.epochs = 255\n"
        "train.learning_rate = 0.001\n"
        "train.crop_size = 64\n"
        "train.momentum = 0.5\n"
        "train.loss_mode = supervised\n"
        "train.seed = 7\n"
        "cache.dir = /tmp/somewhere\n"
        "seed = 11\n");
    CHECK(cfg.evaluator == EvalKind::Supervised);
    CHECK(cfg.weights.beta == 0.7);
    CHECK(cfg.weights.beta1 == 0.3);
    CHECK(cfg.weights.alpha[0] == 0.4);
    CHECK(cfg.weights.alpha[5] == 0.05);
    CHECK(cfg.weights.alpha[1] == doctest::Approx(1.0 / 6));
    CHECK(cfg.weights.norm_for(MetricId::AG).hi == 25.0);
    CHECK(cfg.weights.norm_for(MetricId::PSNR).lo == 10.0);
    CHECK(cfg.weights.norm_for(MetricId::MI).flip);
    CHECK(cfg.weights.norm_for(MetricId::NIQE).kind == NormMap::Kind::AffineClamp);
    CHECK(cfg.weights.norm_for(MetricId::EN).kind == NormMap::Kind::Reciprocal);
    REQUIRE(cfg.nss_model.has_value());
    CHECK(cfg.nss_model->string() == "models/ref.nss");
    CHECK(cfg.nss_patch_size == 32);
    CHECK(cfg.nss_sharpness_fraction == 0.5);
    CHECK(cfg.methods == std::vector<std::string>{"avg", "lp", "tsal"});
    CHECK(cfg.method_params.at("avg").weight == 0.75);
    CHECK(cfg.method_params.at("lp").levels == 3);
    REQUIRE(cfg.method_params.at("lp").tasks.has_value());
    CHECK(cfg.method_params.at("lp").tasks->size() == 2);
    CHECK(cfg.train.batch_size == 2);
    CHECK(cfg.train.epochs == 255);
    CHECK(cfg.train.learning_rate == 0.001);
    CHECK(cfg.train.crop_size == 64);
    CHECK(cfg.train.momentum == 0.5);
    CHECK(cfg.train.mode == LossMode::Supervised);
    CHECK(cfg.train.seed == 7);
    REQUIRE(cfg.cache_dir.has_value());
    CHECK(cfg.cache_dir->string() == "/tmp/somewhere");
    CHECK(cfg.seed == 11);
}

TEST_CASE("comments and blank lines are ignored anywhere") {
    const Config cfg = parse(
        "# full line comment\n"
        "\n"
        "   \n"
        "seed = 5   # trailing comment\n"
        "train.epochs = 2 # another\n");
    CHECK(cfg.seed == 5);
    CHECK(cfg.train.epochs == 2);
}

TEST_CASE("unknown keys carry the origin and line") {
    const std::string msg = message_of<UnknownKey>("seed = 1\nbogus.key = 2\n");
    CHECK(msg.find("test.cfg:2") != std::string::npos);
    CHECK(msg.find("bogus.key") != std::string::npos);

    CHECK_THROWS_AS(parse("norm.volume.hi = 2\n"), UnknownKey);
    CHECK_THROWS_AS(parse("norm.en.mystery = 2\n"), UnknownKey);
    CHECK_THROWS_AS(parse("registry.avg.mystery = 2\n"), UnknownKey);
    CHECK_THROWS_AS(parse("registry.unknownmethod.weight = 2\n"), UnknownKey);
    CHECK_THROWS_AS(parse("weights.alpha6 = 0.1\n"), UnknownKey);
}

TEST_CASE("malformed values report type errors with line numbers") {
    const std::string msg = message_of<TypeError>("train.epochs = soon\n");
    CHECK(msg.find("test.cfg:1") != std::string::npos);
    CHECK(msg.find("train.epochs") != std::string::npos);

    CHECK_THROWS_AS(parse("weights.beta = heavy\n"), TypeError);
    CHECK_THROWS_AS(parse("weights.beta = 0.5x\n"), TypeError);
    CHECK_THROWS_AS(parse("norm.mi.flip = maybe\n"), TypeError);
    CHECK_THROWS_AS(parse("norm.en.kind = log\n"), TypeError);
    CHECK_THROWS_AS(parse("evaluator = e3\n"), TypeError);
    CHECK_THROWS_AS(parse("train.loss_mode = mystery\n"), TypeError);
    CHECK_THROWS_AS(parse("registry.methods = avg, mystery\n"), TypeError);
    CHECK_THROWS_AS(parse("registry.lp.tasks = multifocus, sonar\n"), TypeError);
    CHECK_THROWS_AS(parse("seed = -4\n"), TypeError);
    CHECK_THROWS_AS(parse("just a line\n"), TypeError);
}

TEST_CASE("out of range values are rejected at the end of the pass") {
    CHECK_THROWS_AS(parse("weights.beta = -0.5\n"), RangeError);
    CHECK_THROWS_AS(parse("weights.alpha2 = -0.1\n"), RangeError);
    CHECK_THROWS_AS(parse("train.batch_size = 0\n"), RangeError);
    CHECK_THROWS_AS(parse("train.momentum = 1\n"), RangeError);
    CHECK_THROWS_AS(parse("train.crop_size = 8\n"), RangeError);
    CHECK_THROWS_AS(parse("nss.patch_size = 8\n"), RangeError);
    CHECK_THROWS_AS(parse("nss.sharpness_fraction = 0\n"), RangeError);
    CHECK_THROWS_AS(parse("nss.sharpness_fraction = 1.5\n"), RangeError);
    CHECK_THROWS_AS(parse("registry.methods =\n"), RangeError);
    CHECK_THROWS_AS(parse("registry.maxsel.radius = 0\n"), RangeError);
    CHECK_THROWS_AS(parse("registry.lp.levels = 1\n"), RangeError);
    CHECK_THROWS_AS(parse("registry.lp.tasks =\n"), RangeError);
}

TEST_CASE("later lines override earlier ones") {
    const Config cfg = parse("seed = 1\nseed = 2\ntrain.epochs = 9\ntrain.epochs = 4\n");
    CHECK(cfg.seed == 2);
    CHECK(cfg.train.epochs == 4);
}

TEST_CASE("build registry honors the configured subset and parameters") {
    Config cfg = parse(
        "registry.methods = lp, avg\n"
        "registry.avg.weight = 1.0\n"
        "registry.lp.tasks = medical\n");
    const MethodRegistry reg = build_registry(cfg);
    REQUIRE(reg.size() == 2);
    CHECK(reg.entries()[0].id.name == "lp");
    CHECK(reg.entries()[1].id.name == "avg");

    // avg with weight 1 returns source a bitwise
    const ImagePair pair = make_task_pair("t", Task::Medical, 32, 32, 3);
    const GrayImage out = reg.find("avg")->fn(pair);
    CHECK(testutil::bitwise_equal(out, pair.a));

    // lp restricted to medical disappears for other tasks
    const ImagePair focus = make_task_pair("f", Task::MultiFocus, 32, 32, 4);
    const auto focus_out = registry_fuse_all(reg, focus);
    REQUIRE(focus_out.size() == 1);
    CHECK(focus_out[0].first.name == "avg");

    // defaults build the full set of five
    const MethodRegistry full = build_registry(parse(""));
    CHECK(full.size() == 5);
}

TEST_CASE("config loading reports missing files") {
    CHECK_THROWS_AS(load_config("/nonexistent/definitely_missing.cfg"), IoFailure);
}

TEST_CASE("manifest loads entries and resolves relative paths") {
    testutil::TempDir dir("manifest_ok");
    const GrayImage a = make_pristine(24, 24, 5);
    const GrayImage b = make_pristine(24, 24, 6);
    save_pgm(a, dir.path / "a.pgm");
    save_pgm(b, dir.path / "b.pgm");
    std::filesystem::create_directories(dir.path / "refs");
    save_pgm(a, dir.path / "refs" / "r.pgm");
    {
        std::ofstream out(dir.path / "pairs.csv");
        out << "pair_id,path_a,path_b,path_ref,task\n";
        out << "p1,a.pgm,b.pgm,refs/r.pgm,multifocus\n";
        out << "p2,a.pgm,b.pgm,,unknown\n";
    }
    const auto entries = load_manifest(dir.path / "pairs.csv");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].pair_id == "p1");
    CHECK(entries[0].task == Task::MultiFocus);
    CHECK(entries[0].has_ref());
    CHECK(entries[1].task == Task::Unknown);
    CHECK_FALSE(entries[1].has_ref());

    const ImagePair pair = load_pair(entries[0]);
    CHECK(pair.id == "p1");
    CHECK(pair.a.width() == 24);
    CHECK(testutil::max_abs_diff(pair.a, a) <= 0.5 / 255.0 + 1e-12);
}

TEST_CASE("manifest rejects malformed inputs with the offending line") {
    testutil::TempDir dir("manifest_bad");
    const GrayImage a = make_pristine(16, 16, 7);
    save_pgm(a, dir.path / "a.pgm");

    auto write_manifest = [&](const std::string& body) {
        std::ofstream out(dir.path / "pairs.csv");
        out << body;
    };
    auto expect_error = [&](const std::string& body, const std::string& needle) {
        write_manifest(body);
        try {
            load_manifest(dir.path / "pairs.csv");
            FAIL_CHECK("expected ManifestError for: " << needle);
        } catch (const ManifestError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error("pair,path_a,path_b,path_ref,task\n", "header");
    expect_error("pair_id,path_a,path_b,path_ref,task\np1,a.pgm,a.pgm,,unknown\np1,a.pgm,a.pgm,,unknown\n",
                 "duplicate");
    expect_error("pair_id,path_a,path_b,path_ref,task\npx,a.pgm,missing.pgm,,unknown\n",
                 "missing.pgm");
    expect_error("pair_id,path_a,path_b,path_ref,task\npx,a.pgm,a.pgm,,sonar\n", ":2");
    expect_error("pair_id,path_a,path_b,path_ref,task\nbad id!,a.pgm,a.pgm,,unknown\n", "pair_id");
    expect_error("pair_id,path_a,path_b,path_ref,task\nonly,three,fields\n", "field");

    CHECK_THROWS_AS(load_manifest(dir.path / "absent.csv"), IoFailure);
}

TEST_CASE("manifest save and reload round trips") {
    testutil::TempDir dir("manifest_roundtrip");
    const GrayImage a = make_pristine(16, 16, 8);
    save_pgm(a, dir.path / "a.pgm");
    save_pgm(a, dir.path / "b.pgm");

    std::vector<ManifestEntry> entries;
    ManifestEntry e;
    e.pair_id = "pq";
    e.path_a = dir.path / "a.pgm";
    e.path_b = dir.path / "b.pgm";
    e.task = Task::Cvs;
    entries.push_back(e);
    save_manifest(entries, dir.path / "pairs.csv");

    const auto back = load_manifest(dir.path / "pairs.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].pair_id == "pq");
    CHECK(back[0].task == Task::Cvs);
    CHECK(std::filesystem::equivalent(back[0].path_a, e.path_a));
}
