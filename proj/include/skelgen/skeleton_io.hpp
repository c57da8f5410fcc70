#pragma once

#include "skelgen/skeleton.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace skelgen {

// Binary skeleton ingest format, one record per clip, records back to back:
//
//   u32   id length in bytes, then the UTF-8 clip id
//   f32   fps
//   u32   frame count F
//   u32   keypoint count K (133 for whole-body tracks)
//   F*K*3 f32 (x, y, confidence) triples, frame-major
//
// All integers and floats are little-endian. A sidecar text manifest at
// `<path>.manifest` lists "clip_id<TAB>frames" per record.
void write_skeleton_file(const std::filesystem::path& path, const std::vector<SkeletonSequence>& clips);
std::vector<SkeletonSequence> read_skeleton_file(const std::filesystem::path& path);

struct SkeletonManifestEntry {
    std::string clip_id;
    int frames = 0;
};

std::filesystem::path skeleton_manifest_path(const std::filesystem::path& skeleton_file);
std::vector<SkeletonManifestEntry> read_skeleton_manifest(const std::filesystem::path& manifest);

}  // namespace skelgen
