#include "skelgen/audio_features.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

using namespace skelgen;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("feature file round-trips float32 values bit-exactly") {
    auto feat = synthetic_features(100, 3);
    feat.values = feat.values.cast<float>().cast<double>();
    const auto path = temp_file("skelgen_feat_roundtrip.feat");
    save_features(path, feat);
    const auto back = load_features(path);
    CHECK(back.values.rows() == 100);
    CHECK(back.values.cols() == 768);
    CHECK(back.values == feat.values);
    CHECK(back.source_rate == 50.0);
    std::filesystem::remove(path);
}

TEST_CASE("load_features rejects a 767-column file") {
    const auto path = temp_file("skelgen_feat_767.feat");
    {
        std::ofstream os(path, std::ios::binary);
        os.write(kFeatureMagic, 8);
        const std::uint32_t rows = 2, cols = 767;
        const float rate = 50.0f;
        os.write(reinterpret_cast<const char*>(&rows), 4);
        os.write(reinterpret_cast<const char*>(&cols), 4);
        os.write(reinterpret_cast<const char*>(&rate), 4);
        const std::vector<float> zeros(rows * cols, 0.0f);
        os.write(reinterpret_cast<const char*>(zeros.data()), static_cast<std::streamsize>(zeros.size() * 4));
    }
    CHECK_THROWS_WITH_AS(load_features(path), doctest::Contains("767"), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("load_features rejects a bad header") {
    const auto path = temp_file("skelgen_feat_bad.feat");
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOTAFEATFILE";
    }
    CHECK_THROWS_AS(load_features(path), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("align_to_frames: 50 Hz, 10 s -> 250 frames sampled at frame midpoints") {
    AudioFeatureSequence feat;
    feat.source_rate = 50.0;
    feat.values.resize(500, kAudioDim);
    for (int r = 0; r < 500; ++r) {
        for (int c = 0; c < kAudioDim; ++c) {
            feat.values(r, c) = std::sin(0.01 * r * (c + 1)) + 0.001 * c;
        }
    }
    const auto out = align_to_frames(feat, 250);
    REQUIRE(out.values.rows() == 250);
    // Frame f probes t = (f + 0.5) / 25 s, i.e. feature index 2f + 0.5:
    // halfway between rows 2f and 2f + 1.
    for (int f : {0, 123, 249}) {
        for (int c : {0, 100, 767}) {
            const double expected = 0.5 * (feat.values(2 * f, c) + feat.values(2 * f + 1, c));
            CHECK(out.values(f, c) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("align_to_frames is the identity on an aligned track") {
    auto feat = synthetic_features(80, 5, 25.0);
    const auto out = align_to_frames(feat, 80);
    CHECK(skelgen::testing::max_abs_diff(out.values, feat.values) < 1e-6);
}

TEST_CASE("align_to_frames keeps a constant track constant and stays within brackets") {
    AudioFeatureSequence feat;
    feat.values = Matrix::Constant(37, kAudioDim, 0.25);
    for (int frames : {1, 7, 18, 100}) {
        const auto out = align_to_frames(feat, frames);
        CHECK(out.values.rows() == frames);
        CHECK((out.values.array() - 0.25).abs().maxCoeff() < 1e-15);
    }
    auto walk = synthetic_features(64, 9);
    const auto out = align_to_frames(walk, 29);
    CHECK(out.values.maxCoeff() <= walk.values.maxCoeff());
    CHECK(out.values.minCoeff() >= walk.values.minCoeff());
}

TEST_CASE("align_to_frames preconditions") {
    AudioFeatureSequence empty;
    empty.values.resize(0, kAudioDim);
    CHECK_THROWS_AS(align_to_frames(empty, 4), std::invalid_argument);
    CHECK_THROWS_AS(align_to_frames(synthetic_features(4, 1), 0), std::invalid_argument);
}

TEST_CASE("frames_for_duration") {
    CHECK(frames_for_duration(synthetic_features(500, 1)) == 250);
    CHECK(frames_for_duration(synthetic_features(101, 1)) == 50);
}

TEST_CASE("validate reports instead of throwing") {
    auto feat = synthetic_features(80, 2, 25.0);
    CHECK(validate(feat, 80).ok());

    auto short_feat = synthetic_features(79, 2, 25.0);
    const auto r = validate(short_feat, 80);
    REQUIRE(r.issues.size() == 1);
    CHECK(r.issues[0].kind == FeatureIssue::Kind::Length);

    feat.values(3, 17) = std::numeric_limits<double>::quiet_NaN();
    const auto n = validate(feat, 80);
    REQUIRE(n.issues.size() == 1);
    CHECK(n.issues[0].kind == FeatureIssue::Kind::NonFinite);
    CHECK(n.issues[0].message.find("row 3") != std::string::npos);
    CHECK(n.issues[0].message.find("column 17") != std::string::npos);

    AudioFeatureSequence wrong;
    wrong.values = Matrix::Zero(80, 767);
    CHECK(validate(wrong, 80).issues[0].kind == FeatureIssue::Kind::Shape);
}

TEST_CASE("synthetic features are seeded") {
    CHECK(synthetic_features(10, 4).values == synthetic_features(10, 4).values);
    CHECK(synthetic_features(10, 4).values != synthetic_features(10, 5).values);
}
