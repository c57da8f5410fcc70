#pragma once

#include "skelgen/audio_features.hpp"
#include "skelgen/diffusion.hpp"
#include "skelgen/image.hpp"
#include "skelgen/skeleton.hpp"
#include "skelgen/trainer.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace skelgen {

struct GenerationRequest {
    std::filesystem::path checkpoint;
    SkeletonFrame reference;  // global crop coordinates
    AudioFeatureSequence audio;
    GuidanceConfig guidance;
    std::uint64_t seed = 0;
    std::optional<int> frames;  // default: floor(25 * audio duration)
    std::string id = "generated";
};

// Frame count used when the request leaves it open.
int default_frame_count(const AudioFeatureSequence& audio);

// Throws std::invalid_argument when the frame count exceeds the model's
// max_frames or the reference does not have 133 keypoints.
SkeletonSequence generate(const GenerationRequest& request);
SkeletonSequence generate(const Checkpoint& ckpt, const GenerationRequest& request);

enum class PoseVariant { FullBody, HandsOnly };

PoseVariant parse_pose_variant(const std::string& name);
std::string to_string(PoseVariant variant);

// Line-based text format:
//   skelgen-pose 1
//   id <clip id>
//   fps <fps>
//   keypoints <K>
//   frames <F>
// followed by F lines of K "x y conf" triples, space separated.
void export_pose(const SkeletonSequence& seq, const std::filesystem::path& path,
                 PoseVariant variant = PoseVariant::FullBody);
SkeletonSequence import_pose(const std::filesystem::path& path);

// Binary skeleton file (first clip) or text pose file, picked by content.
SkeletonSequence read_any_pose(const std::filesystem::path& path);

struct RenderStyle {
    int canvas = 512;
    int line_width = 4;
    int point_radius = 3;  // 0 disables keypoint dots
    double confidence_threshold = 0.3;
    bool draw_face = true;
    std::array<std::uint8_t, 3> background{0, 0, 0};
    // Limb colours cycle through this list; empty selects the built-in palette.
    std::vector<std::array<std::uint8_t, 3>> palette;
};

struct Edge {
    int a;
    int b;
};

// Limb list over global 133-keypoint indices: body, feet, then both hands.
const std::vector<Edge>& wholebody_edges();

// Keypoints are mapped with x_px = round(x * (canvas - 1)); segments are
// rasterized with Bresenham's algorithm and thickened by stamping discs.
Image render_frame(const SkeletonFrame& frame, const RenderStyle& style = {});
std::vector<Image> render(const SkeletonSequence& seq, const RenderStyle& style = {});

// Writes frame_00000.png, frame_00001.png, ... and returns the paths.
std::vector<std::filesystem::path> render_to_directory(const SkeletonSequence& seq,
                                                       const std::filesystem::path& dir,
                                                       const RenderStyle& style = {});

}  // namespace skelgen
