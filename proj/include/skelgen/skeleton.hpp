#pragma once

#include "skelgen/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace skelgen {

// A single 2D pose. coords is K x 2 (x, y) in crop-normalized units,
// confidence is K detector scores in [0, 1].
struct SkeletonFrame {
    Eigen::Matrix<double, Eigen::Dynamic, 2> coords;
    Vector confidence;

    int num_keypoints() const { return static_cast<int>(coords.rows()); }
};

// F frames of K keypoints at a fixed frame rate.
//   coords:     F x 2K, interleaved (x0, y0, x1, y1, ...)
//   confidence: F x K
struct SkeletonSequence {
    std::string id;
    double fps = kFps;
    Matrix coords;
    Matrix confidence;

    int num_frames() const { return static_cast<int>(coords.rows()); }
    int num_keypoints() const { return static_cast<int>(confidence.cols()); }

    SkeletonFrame frame(int f) const;
    void set_frame(int f, const SkeletonFrame& frame);

    static SkeletonSequence zeros(int frames, int keypoints = kNumKeypoints);
    static SkeletonSequence from_frames(const std::vector<SkeletonFrame>& frames);
};

// Throws std::invalid_argument when shapes disagree, a coordinate is not
// finite or a confidence leaves [0, 1]. `expected_keypoints` < 0 skips the count check.
void validate(const SkeletonSequence& seq, int expected_keypoints = kNumKeypoints);

enum class PartGroup { Body, Face, LeftHand, RightHand };

// Which joint each keypoint is expressed relative to.
//
// Face keypoints hang off face_root, hand keypoints off their wrist, and every
// body keypoint (including the three part roots) off the body root. The body
// root is the midpoint of body_root_a and body_root_b; its absolute position is
// stored in the slot of body_root_a, which is recoverable because the offsets
// of a and b are mirror images. When a == b the keypoint is itself the root.
struct RootMap {
    int face_root = wholebody::kNose;
    int left_hand_root = wholebody::kLeftWrist;
    int right_hand_root = wholebody::kRightWrist;
    int body_root_a = wholebody::kLeftShoulder;
    int body_root_b = wholebody::kRightShoulder;
    std::array<PartGroup, kNumKeypoints> groups = default_groups();

    static std::array<PartGroup, kNumKeypoints> default_groups();

    int root_of(int keypoint) const;
    bool operator==(const RootMap&) const = default;
};

// Throws std::invalid_argument if the roots are out of range or not body keypoints.
void validate(const RootMap& roots);

// Root-relative motion, F x 2K.
struct LocalMotionSequence {
    Matrix values;
    RootMap root_map;

    int num_frames() const { return static_cast<int>(values.rows()); }
};

LocalMotionSequence to_local(const SkeletonSequence& seq, const RootMap& roots = {});
SkeletonSequence from_local(const LocalMotionSequence& lm, const RootMap& roots = {});

// Global encoding keeps raw crop coordinates; it backs the
// "without local representation" ablation.
enum class MotionEncoding { Local, Global };

MotionEncoding parse_motion_encoding(const std::string& name);
std::string to_string(MotionEncoding encoding);

Matrix encode_motion(const SkeletonSequence& seq, MotionEncoding encoding, const RootMap& roots = {});
SkeletonSequence decode_motion(const Matrix& values, MotionEncoding encoding, const RootMap& roots = {});

// Mouth landmarks 48-67 of the 68-point face, in global indices (71..90).
std::vector<int> mouth_indices();

// Centered moving average of every (x, y) track with edge truncation.
// Keypoints in `exclude` are copied through untouched. Confidences are copied.
SkeletonSequence smooth(const SkeletonSequence& seq, int window, const std::vector<int>& exclude);
SkeletonSequence smooth(const SkeletonSequence& seq, int window = 5);

struct NormalizationStats {
    RowVector mean;
    RowVector std;
};

inline constexpr double kStdFloor = 1e-6;

NormalizationStats fit_normalization(const std::vector<LocalMotionSequence>& corpus);
NormalizationStats fit_normalization(const std::vector<Matrix>& corpus);
Matrix normalize(const Matrix& values, const NormalizationStats& stats);
Matrix denormalize(const Matrix& values, const NormalizationStats& stats);
LocalMotionSequence normalize(const LocalMotionSequence& lm, const NormalizationStats& stats);
LocalMotionSequence denormalize(const LocalMotionSequence& lm, const NormalizationStats& stats);

// Keypoints 91..132 (left hand then right hand), 42 per frame.
SkeletonSequence extract_hand_skeletons(const SkeletonSequence& seq);

double shoulder_width(const SkeletonFrame& frame);

}  // namespace skelgen
