#pragma once

#include "skelgen/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace skelgen {

// Per-segment speech embeddings, rows x 768.
struct AudioFeatureSequence {
    Matrix values;
    double source_rate = 50.0;  // rows per second of audio

    int num_rows() const { return static_cast<int>(values.rows()); }
    double duration_seconds() const { return static_cast<double>(values.rows()) / source_rate; }
};

// Feature file: 8-byte magic "SKGFEAT1", u32 rows, u32 cols (= 768),
// f32 source_rate, then rows*cols little-endian f32, row-major.
inline constexpr char kFeatureMagic[9] = "SKGFEAT1";

void save_features(const std::filesystem::path& path, const AudioFeatureSequence& feat);
AudioFeatureSequence load_features(const std::filesystem::path& path);

// Linear interpolation onto frame midpoints (f + 0.5) / fps. Feature row i is
// centred at (i + 0.5) / source_rate; probes outside the first/last centre clamp.
AudioFeatureSequence align_to_frames(const AudioFeatureSequence& feat, int frames, double fps = kFps);

// Number of whole video frames covered by the feature track.
int frames_for_duration(const AudioFeatureSequence& feat, double fps = kFps);

struct FeatureIssue {
    enum class Kind { Shape, Length, NonFinite };
    Kind kind;
    std::string message;
};

struct FeatureReport {
    std::vector<FeatureIssue> issues;
    bool ok() const { return issues.empty(); }
};

// Never throws; collects every problem found.
FeatureReport validate(const AudioFeatureSequence& feat, int expected_frames);

// Seeded random walk standing in for real encoder output in tests and demos.
AudioFeatureSequence synthetic_features(int rows, std::uint64_t seed, double source_rate = 50.0,
                                        double step = 0.1);

}  // namespace skelgen
