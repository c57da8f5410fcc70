#pragma once

#include "skelgen/config.hpp"
#include "skelgen/skeleton.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace skelgen {

// Per-frame colour histogram: 8 bins for each of 3 channels.
inline constexpr int kHistogramBins = 8;
using ColorHistogram = std::array<double, 3 * kHistogramBins>;

// Bins each RGB channel of an 8-bit pixel buffer into 8 equal-width bins.
ColorHistogram color_histogram(const std::vector<std::uint8_t>& rgb);

// Chi-square distance between channel-normalized histograms:
//   (1/3) sum_c 0.5 sum_i (a_ci - b_ci)^2 / (a_ci + b_ci),
// with empty bin pairs skipped. Ranges over [0, 1].
double chi_square_distance(const ColorHistogram& a, const ColorHistogram& b);

inline constexpr double kDefaultShotThreshold = 0.3;

// Frame indices f (>= 1) where distance(frame f-1, frame f) exceeds the threshold.
std::vector<int> detect_shots(const std::vector<ColorHistogram>& frames, double threshold = kDefaultShotThreshold);

struct FrameRange {
    int begin = 0;
    int end = 0;  // exclusive
    int length() const { return end - begin; }
    bool operator==(const FrameRange&) const = default;
};

struct SegmentRules {
    int min_frames = 125;  // 5 s at 25 FPS
    int max_frames = 375;  // 15 s
};

// Splits every shot greedily into max_frames pieces; a remainder shorter
// than min_frames is dropped.
std::vector<FrameRange> segment_clips(const std::vector<int>& cuts, int total_frames, const SegmentRules& rules = {});

struct FilterRules {
    double upper_body_conf = 0.5;
    double upper_body_frame_fraction = 0.95;
    double frontal_ratio = 0.15;  // median shoulder width / bbox height
    double nose_conf = 0.5;
    double min_height = 0.30;     // median bbox height, crop units
    double min_motion = 1e-3;     // mean per-frame wrist displacement
    double bbox_conf = 0.3;       // keypoints below this do not count toward the bbox
    bool enable_upper_body = true;
    bool enable_frontal = true;
    bool enable_size = true;
    bool enable_motion = true;
};

// Unknown keys are rejected.
FilterRules filter_rules_from(const KeyValues& kv);

struct RuleVerdict {
    bool pass = false;
    double value = 0.0;  // the measured statistic
};

struct ClipVerdict {
    std::map<std::string, RuleVerdict> rules;  // upper_body, frontal, size, motion
    bool accepted() const;
};

ClipVerdict filter_clip(const SkeletonSequence& seq, const FilterRules& rules = {});

// Square crop: p' = (p - origin) / side in normalized crop units (the 512
// pixel target cancels).
struct CropTransform {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double side = 1.0;
    int target = 512;
};

struct BoundingBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
};

// Union of the track, grown by `margin` times its longer side on every edge,
// squared about its centre and shifted (then shrunk if needed) to stay inside
// the frame.
CropTransform crop_and_resize(const std::vector<BoundingBox>& track, double margin, int frame_width,
                              int frame_height);

SkeletonSequence transform_keypoints(const SkeletonSequence& seq, const CropTransform& t);
SkeletonSequence inverse_transform_keypoints(const SkeletonSequence& seq, const CropTransform& t);

struct ClipManifestEntry {
    std::string clip_id;
    std::string source_id;
    FrameRange range;
    double fps = 25.0;
    ClipVerdict verdict;
    CropTransform crop;
};

// One tab-separated line per clip:
//   clip_id source_id begin end fps accepted verdicts crop
// verdicts: comma-separated rule=pass|fail:value; crop: origin_x,origin_y,side,target.
std::string to_manifest_line(const ClipManifestEntry& e);
ClipManifestEntry parse_manifest_line(const std::string& line);
void write_manifest(const std::filesystem::path& path, const std::vector<ClipManifestEntry>& entries);
std::vector<ClipManifestEntry> read_manifest(const std::filesystem::path& path);

// Histogram sidecar: one line per frame, 24 whitespace-separated values.
void write_histograms(const std::filesystem::path& path, const std::vector<ColorHistogram>& frames);
std::vector<ColorHistogram> read_histograms(const std::filesystem::path& path);

}  // namespace skelgen
