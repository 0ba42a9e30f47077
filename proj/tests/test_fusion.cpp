#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "aefuse/errors.hpp"
#include "aefuse/filter.hpp"
#include "aefuse/fusion.hpp"
#include "aefuse/metrics.hpp"
#include "aefuse/synthetic.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aefuse;

namespace {

ImagePair identical_pair(int w, int h, uint64_t seed) {
    GrayImage img = testutil::random_image(w, h, seed);
    return ImagePair("same", img, img, Task::Unknown);
}

std::vector<std::pair<std::string, FusionFn>> stock_operators() {
    return {
        {"avg", [](const ImagePair& p) { return fuse_average(p, 0.5); }},
        {"maxsel", [](const ImagePair& p) { return fuse_max_energy(p, 3); }},
        {"lp", [](const ImagePair& p) { return fuse_laplacian_pyramid(p, 4); }},
        {"rp", [](const ImagePair& p) { return fuse_ratio_pyramid(p, 4); }},
        {"tsal", [](const ImagePair& p) { return fuse_two_scale_saliency(p); }},
    };
}

}  // namespace

TEST_CASE("every operator reproduces identical sources") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const ImagePair pair = identical_pair(40, 36, seed);
        for (const auto& [name, fn] : stock_operators()) {
            CAPTURE(name);
            CAPTURE(seed);
            const GrayImage fused = fn(pair);
            REQUIRE(fused.same_shape(pair.a));
            CHECK(testutil::max_abs_diff(fused, pair.a) < 1e-6);
        }
    }
}

TEST_CASE("average fusion honors its weight") {
    const ImagePair pair("p", testutil::random_image(17, 13, 4), testutil::random_image(17, 13, 5),
                         Task::Unknown);
    const GrayImage w1 = fuse_average(pair, 1.0);
    CHECK(testutil::bitwise_equal(w1, pair.a));
    const GrayImage w0 = fuse_average(pair, 0.0);
    CHECK(testutil::bitwise_equal(w0, pair.b));
    const GrayImage mid = fuse_average(pair, 0.25);
    for (int y = 0; y < mid.height(); ++y)
        for (int x = 0; x < mid.width(); ++x) {
            const double expect = pair.b.at(y, x) + 0.25 * (pair.a.at(y, x) - pair.b.at(y, x));
            CHECK(mid.at(y, x) == doctest::Approx(expect).epsilon(1e-15));
        }
    CHECK_THROWS_AS(fuse_average(pair, -0.01), WeightOutOfRange);
    CHECK_THROWS_AS(fuse_average(pair, 1.01), WeightOutOfRange);
}

TEST_CASE("max energy selection prefers the sharper source and breaks ties toward a") {
    // b is a blurred copy of a textured scene, so a wins everywhere textured
    const GrayImage sharp = make_pristine(48, 48, 6);
    const GrayImage soft = gaussian_blur(sharp, 5, 3.0);
    const ImagePair pair("p", sharp, soft, Task::Unknown);
    const GrayImage fused = fuse_max_energy(pair, 3);
    double picked_a = 0.0;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x)
            if (fused.at(y, x) == sharp.at(y, x)) picked_a += 1.0;
    CHECK(picked_a / (48.0 * 48.0) > 0.9);

    // flat pair: energies tie at zero, a must win every pixel
    const GrayImage fa = testutil::constant(16, 16, 0.3);
    const GrayImage fb = testutil::constant(16, 16, 0.7);
    const GrayImage tied = fuse_max_energy(ImagePair("t", fa, fb, Task::Unknown), 3);
    CHECK(testutil::bitwise_equal(tied, fa));
}

TEST_CASE("laplacian pyramid reconstruction is near exact") {
    for (auto [w, h] : {std::pair{64, 64}, std::pair{48, 36}, std::pair{33, 47}}) {
        const GrayImage img = testutil::random_image(w, h, 7);
        const Pyramid bands = build_laplacian_pyramid(img, 4);
        const GrayImage back = collapse_laplacian(bands);
        CAPTURE(w);
        CAPTURE(h);
        CHECK(testutil::max_abs_diff(back, img) <= 1e-6);
    }
}

TEST_CASE("gaussian pyramid halves dimensions per level") {
    const GrayImage img = testutil::random_image(33, 20, 8);
    const Pyramid pyr = build_gaussian_pyramid(img, 4);
    REQUIRE(pyr.size() == 4);
    CHECK(pyr[0].width() == 33);
    CHECK(pyr[1].width() == 17);
    CHECK(pyr[2].width() == 9);
    CHECK(pyr[3].width() == 5);
    CHECK(pyr[0].height() == 20);
    CHECK(pyr[1].height() == 10);
    CHECK(pyr[2].height() == 5);
    CHECK(pyr[3].height() == 3);
}

TEST_CASE("pyramid level limits") {
    const GrayImage img = testutil::random_image(64, 64, 9);
    const int cap = max_pyramid_levels(img);
    CHECK(cap == 6);
    CHECK(max_pyramid_levels(testutil::random_image(33, 70, 9)) == 5);

    const ImagePair pair("p", img, testutil::random_image(64, 64, 10), Task::Unknown);
    CHECK_THROWS_AS(fuse_laplacian_pyramid(pair, 1), TooManyLevels);
    CHECK_THROWS_AS(fuse_laplacian_pyramid(pair, cap + 1), TooManyLevels);
    CHECK_NOTHROW(fuse_laplacian_pyramid(pair, cap));

    const ImagePair tiny("t", testutil::random_image(8, 8, 10), testutil::random_image(8, 8, 11),
                         Task::Unknown);
    CHECK_THROWS_AS(fuse_laplacian_pyramid(tiny, 12), TooManyLevels);
    CHECK_THROWS_AS(fuse_ratio_pyramid(tiny, 12), TooManyLevels);
}

TEST_CASE("pyramid fusion of a focus split beats either source on gradient") {
    const ImagePair pair = make_task_pair("mf", Task::MultiFocus, 96, 96, 12);
    const double ga = avg_gradient(pair.a);
    const double gb = avg_gradient(pair.b);
    const double gl = avg_gradient(fuse_laplacian_pyramid(pair, 4));
    const double gm = avg_gradient(fuse_max_energy(pair, 3));
    CHECK(gl > std::max(ga, gb));
    CHECK(gm > std::max(ga, gb));
}

TEST_CASE("ratio pyramid tracks exposure structure") {
    const ImagePair pair = make_task_pair("me", Task::MultiExposure, 64, 64, 13);
    const GrayImage fused = fuse_ratio_pyramid(pair, 4);
    CHECK(fused.same_shape(pair.a));
    for (double v : fused.pixels()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // fused mean sits between the dark and bright renderings
    const double ma = testutil::mean(pair.a);
    const double mb = testutil::mean(pair.b);
    const double mf = testutil::mean(fused);
    CHECK(mf > std::min(ma, mb) - 0.05);
    CHECK(mf < std::max(ma, mb) + 0.05);
}

TEST_CASE("two scale saliency output stays in range and keeps detail") {
    const ImagePair pair = make_task_pair("iv", Task::InfraredVisible, 80, 80, 14);
    const GrayImage fused = fuse_two_scale_saliency(pair);
    CHECK(fused.same_shape(pair.a));
    for (double v : fused.pixels()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const double g = avg_gradient(fused);
    CHECK(g > 0.4 * std::max(avg_gradient(pair.a), avg_gradient(pair.b)));
}

TEST_CASE("operators reject mismatched shapes at pair construction") {
    CHECK_THROWS_AS(ImagePair("bad", testutil::constant(8, 8, 0.1), testutil::constant(8, 9, 0.1),
                              Task::Unknown),
                    DimensionMismatch);
}

TEST_CASE("registry preserves order and rejects duplicates") {
    MethodRegistry reg;
    reg.add({"one", 1}, all_tasks(), [](const ImagePair& p) { return fuse_average(p, 0.5); });
    reg.add({"two", 1}, all_tasks(), [](const ImagePair& p) { return fuse_average(p, 0.5); });
    reg.add({"three", 1}, all_tasks(), [](const ImagePair& p) { return fuse_average(p, 0.5); });
    REQUIRE(reg.size() == 3);
    CHECK(reg.entries()[0].id.name == "one");
    CHECK(reg.entries()[1].id.name == "two");
    CHECK(reg.entries()[2].id.name == "three");
    CHECK(reg.find("two") != nullptr);
    CHECK(reg.find("absent") == nullptr);
    CHECK_THROWS_AS(
        reg.add({"two", 1}, all_tasks(), [](const ImagePair& p) { return fuse_average(p, 0.5); }),
        DuplicateMethodName);
}

TEST_CASE("registry filters methods by task") {
    MethodRegistry reg;
    reg.add({"everywhere", 1}, all_tasks(),
            [](const ImagePair& p) { return fuse_average(p, 0.5); });
    reg.add({"focus-only", 1}, {Task::MultiFocus},
            [](const ImagePair& p) { return fuse_average(p, 0.25); });

    const ImagePair focus = make_task_pair("f", Task::MultiFocus, 32, 32, 15);
    auto out = registry_fuse_all(reg, focus);
    REQUIRE(out.size() == 2);
    CHECK(out[0].first.name == "everywhere");
    CHECK(out[1].first.name == "focus-only");

    const ImagePair medical = make_task_pair("m", Task::Medical, 32, 32, 16);
    out = registry_fuse_all(reg, medical);
    REQUIRE(out.size() == 1);
    CHECK(out[0].first.name == "everywhere");

    // unknown task runs everything
    ImagePair open = make_task_pair("u", Task::Unknown, 32, 32, 17);
    out = registry_fuse_all(reg, open);
    CHECK(out.size() == 2);

    MethodRegistry narrow;
    narrow.add({"focus-only", 1}, {Task::MultiFocus},
               [](const ImagePair& p) { return fuse_average(p, 0.5); });
    CHECK_THROWS_AS(registry_fuse_all(narrow, medical), NoApplicableMethod);
}

TEST_CASE("default registry carries the five stock operators") {
    const MethodRegistry reg = default_registry();
    REQUIRE(reg.size() == 5);
    const std::vector<std::string> expect = {"avg", "maxsel", "lp", "rp", "tsal"};
    for (size_t i = 0; i < expect.size(); ++i) {
        CHECK(reg.entries()[i].id.name == expect[i]);
        CHECK(reg.entries()[i].id.version == 1);
        CHECK(reg.entries()[i].tasks == all_tasks());
    }
    CHECK(all_tasks().size() == 5);

    const ImagePair pair = make_task_pair("any", Task::Cvs, 40, 40, 18);
    const auto out = registry_fuse_all(reg, pair);
    REQUIRE(out.size() == 5);
    for (const auto& [id, img] : out) CHECK(img.same_shape(pair.a));
}
