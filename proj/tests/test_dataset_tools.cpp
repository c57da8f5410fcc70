#include "skelgen/dataset_tools.hpp"
#include "skelgen/synthetic.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

using namespace skelgen;

namespace {

std::vector<std::uint8_t> solid(std::uint8_t r, std::uint8_t g, std::uint8_t b, int pixels = 64) {
    std::vector<std::uint8_t> out;
    for (int i = 0; i < pixels; ++i) {
        out.insert(out.end(), {r, g, b});
    }
    return out;
}

std::vector<int> random_cuts(int count, int total, int min_gap, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pos(min_gap, total - min_gap);
    for (;;) {
        std::set<int> s;
        while (static_cast<int>(s.size()) < count) {
            s.insert(pos(rng));
        }
        std::vector<int> v(s.begin(), s.end());
        bool ok = true;
        for (std::size_t i = 1; i < v.size(); ++i) {
            ok = ok && v[i] - v[i - 1] >= min_gap;
        }
        if (ok) {
            return v;
        }
    }
}

// A clip that passes every default rule: synthetic speaker driven by audio.
SkeletonSequence passing_clip() {
    const auto audio = synthetic_features(120, 4);
    return animate(SpeakerShape{}, align_to_frames(audio, 60).values);
}

}  // namespace

TEST_CASE("colour histograms and chi-square distance") {
    const auto red = color_histogram(solid(250, 0, 0));
    const auto blue = color_histogram(solid(0, 0, 250));
    CHECK(red[7] == 64.0);
    CHECK(red[8] == 64.0);
    CHECK(chi_square_distance(red, red) == 0.0);
    // Red and blue channels are disjoint, green is identical.
    CHECK(chi_square_distance(red, blue) == doctest::Approx(2.0 / 3.0));
    CHECK(chi_square_distance(color_histogram(solid(250, 250, 250)), color_histogram(solid(0, 0, 0))) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(color_histogram({1, 2}), std::invalid_argument);
}

TEST_CASE("detect_shots") {
    SUBCASE("constant colour has no cuts") {
        std::vector<ColorHistogram> frames(40, color_histogram(solid(90, 120, 30)));
        CHECK(detect_shots(frames).empty());
    }
    SUBCASE("50 red then 50 blue frames cut exactly once at 50") {
        std::vector<ColorHistogram> frames(50, color_histogram(solid(250, 0, 0)));
        frames.insert(frames.end(), 50, color_histogram(solid(0, 0, 250)));
        CHECK(detect_shots(frames) == std::vector<int>{50});
    }
    SUBCASE("20 random hard cuts among drifting frames") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 3; ++trial) {
            const auto truth = random_cuts(20, 2000, 10, rng);
            const auto found = detect_shots(synthetic_shot_video(2000, truth, 100 + trial));
            int tp = 0;
            for (int c : truth) {
                tp += std::any_of(found.begin(), found.end(), [&](int f) { return std::abs(f - c) <= 1; }) ? 1 : 0;
            }
            CHECK(found.size() == truth.size());
            CHECK(tp == 20);
        }
    }
}

TEST_CASE("segment_clips") {
    CHECK(segment_clips({}, 400) == std::vector<FrameRange>{{0, 375}});
    CHECK(segment_clips({}, 124).empty());
    CHECK(segment_clips({}, 125) == std::vector<FrameRange>{{0, 125}});
    CHECK(segment_clips({200}, 699) == std::vector<FrameRange>{{0, 200}, {200, 575}});
    CHECK(segment_clips({200}, 700) == std::vector<FrameRange>{{0, 200}, {200, 575}, {575, 700}});
    CHECK(segment_clips({}, 750) == std::vector<FrameRange>{{0, 375}, {375, 750}});
    CHECK_THROWS_AS(segment_clips({50, 10}, 100), std::invalid_argument);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int total = std::uniform_int_distribution<int>(1, 5000)(rng);
        const int n = std::uniform_int_distribution<int>(0, 30)(rng);
        std::vector<int> cuts;
        for (int i = 0; i < n; ++i) {
            cuts.push_back(std::uniform_int_distribution<int>(0, total)(rng));
        }
        std::sort(cuts.begin(), cuts.end());
        const auto clips = segment_clips(cuts, total);
        for (std::size_t i = 0; i < clips.size(); ++i) {
            CHECK(clips[i].length() >= 125);
            CHECK(clips[i].length() <= 375);
            CHECK(clips[i].end <= total);
            if (i > 0) {
                CHECK(clips[i].begin >= clips[i - 1].end);
            }
            // No clip spans a cut.
            for (int c : cuts) {
                CHECK_FALSE((c > clips[i].begin && c < clips[i].end));
            }
        }
    }
}

TEST_CASE("filter_clip rules") {
    const auto good = passing_clip();
    const auto verdict = filter_clip(good);
    CHECK(verdict.rules.size() == 4);
    CHECK(verdict.accepted());

    SUBCASE("zero confidence fails the upper-body rule") {
        auto s = good;
        s.confidence.setZero();
        const auto v = filter_clip(s);
        CHECK_FALSE(v.rules.at("upper_body").pass);
        CHECK(v.rules.at("upper_body").value == 0.0);
    }
    SUBCASE("static sequence fails the motion rule") {
        auto s = good;
        for (int f = 1; f < s.num_frames(); ++f) {
            s.coords.row(f) = s.coords.row(0);
        }
        const auto v = filter_clip(s);
        CHECK_FALSE(v.rules.at("motion").pass);
        CHECK(v.rules.at("motion").value == 0.0);
    }
    SUBCASE("profile view: shoulders shrunk 5x flips the frontal rule") {
        auto s = good;
        for (int f = 0; f < s.num_frames(); ++f) {
            const double cx = 0.5 * (s.coords(f, 10) + s.coords(f, 12));
            const double cy = 0.5 * (s.coords(f, 11) + s.coords(f, 13));
            for (int k : {5, 6}) {
                s.coords(f, 2 * k) = cx + (s.coords(f, 2 * k) - cx) / 5.0;
                s.coords(f, 2 * k + 1) = cy + (s.coords(f, 2 * k + 1) - cy) / 5.0;
            }
        }
        CHECK(verdict.rules.at("frontal").pass);
        CHECK_FALSE(filter_clip(s).rules.at("frontal").pass);
    }
    SUBCASE("small figure fails the size rule") {
        auto s = good;
        s.coords *= 0.2;
        CHECK_FALSE(filter_clip(s).rules.at("size").pass);
    }
    SUBCASE("raising the measured statistic never flips pass to fail") {
        const FilterRules rules;
        auto s = good;
        for (double gain : {1.0, 2.0, 4.0}) {
            auto t = s;
            for (int f = 1; f < t.num_frames(); ++f) {
                t.coords.row(f) = t.coords.row(0) + gain * (s.coords.row(f) - s.coords.row(0));
            }
            CHECK(filter_clip(t, rules).rules.at("motion").pass);
        }
    }
    SUBCASE("disabled rules are absent from the verdict") {
        FilterRules rules;
        rules.enable_motion = false;
        rules.enable_size = false;
        const auto v = filter_clip(good, rules);
        CHECK(v.rules.size() == 2);
        CHECK_FALSE(v.rules.count("motion"));
    }
}

TEST_CASE("filter rules from a key/value file") {
    const auto r = filter_rules_from(KeyValues::parse("min_motion = 0.01\nenable_size = false\n"));
    CHECK(r.min_motion == 0.01);
    CHECK_FALSE(r.enable_size);
    CHECK_THROWS_AS(filter_rules_from(KeyValues::parse("min_motoin = 1\n")), std::invalid_argument);
}

TEST_CASE("crop and keypoint transform") {
    SUBCASE("margin 0: origin maps to (0, 0), centre to (0.5, 0.5)") {
        const auto t = crop_and_resize({{100, 50, 300, 250}}, 0.0, 1920, 1080);
        CHECK(t.origin_x == 100.0);
        CHECK(t.origin_y == 50.0);
        CHECK(t.side == 200.0);
        auto s = SkeletonSequence::zeros(1, 2);
        s.coords << 100, 50, 200, 150;
        const auto out = transform_keypoints(s, t);
        CHECK(out.coords(0, 0) == 0.0);
        CHECK(out.coords(0, 1) == 0.0);
        CHECK(out.coords(0, 2) == 0.5);
        CHECK(out.coords(0, 3) == 0.5);
    }
    SUBCASE("union, margin, squaring and clamping") {
        const auto t = crop_and_resize({{100, 100, 200, 300}, {150, 120, 260, 280}}, 0.1, 640, 360);
        // union 100..260 x 100..300, longest side 200 -> 240, centred at (180, 200)
        CHECK(t.side == doctest::Approx(240.0));
        CHECK(t.origin_x == doctest::Approx(60.0));
        CHECK(t.origin_y == doctest::Approx(80.0));
        const auto edge = crop_and_resize({{0, 0, 100, 100}}, 0.5, 640, 360);
        CHECK(edge.origin_x == 0.0);
        CHECK(edge.origin_y == 0.0);
        const auto big = crop_and_resize({{0, 0, 600, 350}}, 0.5, 640, 360);
        CHECK(big.side == 360.0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(crop_and_resize({}, 0.1, 100, 100), std::invalid_argument);
        CHECK_THROWS_AS(crop_and_resize({{10, 10, 10, 20}}, 0.1, 100, 100), std::invalid_argument);
    }
    SUBCASE("inverse transform and affinity") {
        std::mt19937_64 rng(2);
        auto s = skelgen::testing::random_sequence(5, rng);
        s.coords *= 1000.0;
        const CropTransform t{123.25, 47.5, 417.0, 512};
        const auto back = inverse_transform_keypoints(transform_keypoints(s, t), t);
        CHECK(skelgen::testing::max_abs_diff(back.coords, s.coords) < 1e-6);
        // Midpoints stay midpoints.
        auto line = SkeletonSequence::zeros(1, 3);
        line.coords << 10, 20, 30, 60, 20, 40;
        const auto m = transform_keypoints(line, t);
        CHECK(std::abs(m.coords(0, 4) - 0.5 * (m.coords(0, 0) + m.coords(0, 2))) < 1e-9);
        CHECK(std::abs(m.coords(0, 5) - 0.5 * (m.coords(0, 1) + m.coords(0, 3))) < 1e-9);
    }
}

TEST_CASE("manifest and histogram sidecars round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "skelgen_test_dataset_tools";
    std::filesystem::create_directories(dir);

    ClipManifestEntry e;
    e.clip_id = "vid01_p0_000";
    e.source_id = "vid01";
    e.range = {125, 400};
    e.verdict = filter_clip(passing_clip());
    e.crop = {10.5, 20.25, 333.0, 512};
    ClipManifestEntry r = e;
    r.clip_id = "vid01_p0_001";
    r.verdict.rules["motion"] = {false, 1e-5};
    write_manifest(dir / "manifest.txt", {e, r});
    const auto back = read_manifest(dir / "manifest.txt");
    REQUIRE(back.size() == 2);
    CHECK(back[0].clip_id == e.clip_id);
    CHECK(back[0].range == e.range);
    CHECK(back[0].verdict.accepted());
    CHECK_FALSE(back[1].verdict.accepted());
    CHECK(back[1].verdict.rules.at("motion").value == 1e-5);
    CHECK(back[0].crop.side == 333.0);
    for (const auto& [name, v] : e.verdict.rules) {
        CHECK(back[0].verdict.rules.at(name).value == v.value);
    }
    CHECK_THROWS_AS(parse_manifest_line("a\tb\t1"), std::invalid_argument);

    const auto hist = synthetic_shot_video(12, {6}, 3);
    write_histograms(dir / "h.txt", hist);
    CHECK(read_histograms(dir / "h.txt") == hist);
    std::filesystem::remove_all(dir);
}
