#include "skelgen/skeleton_io.hpp"

#include "skelgen/binary_io.hpp"

#include <fstream>
#include <sstream>

namespace skelgen {

namespace fs = std::filesystem;

fs::path skeleton_manifest_path(const fs::path& skeleton_file) {
    return fs::path(skeleton_file.string() + ".manifest");
}

void write_skeleton_file(const fs::path& path, const std::vector<SkeletonSequence>& clips) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    std::ofstream manifest(skeleton_manifest_path(path));
    if (!manifest) {
        throw std::runtime_error("cannot open manifest for " + path.string());
    }
    for (const auto& clip : clips) {
        validate(clip, -1);
        binary::write_string(os, clip.id);
        binary::write_le<float>(os, static_cast<float>(clip.fps));
        binary::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(clip.num_frames()));
        binary::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(clip.num_keypoints()));
        for (int f = 0; f < clip.num_frames(); ++f) {
            for (int j = 0; j < clip.num_keypoints(); ++j) {
                binary::write_le<float>(os, static_cast<float>(clip.coords(f, 2 * j)));
                binary::write_le<float>(os, static_cast<float>(clip.coords(f, 2 * j + 1)));
                binary::write_le<float>(os, static_cast<float>(clip.confidence(f, j)));
            }
        }
        manifest << clip.id << '\t' << clip.num_frames() << '\n';
    }
    if (!os || !manifest) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::vector<SkeletonSequence> read_skeleton_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open skeleton file " + path.string());
    }
    std::vector<SkeletonSequence> clips;
    while (is.peek() != std::char_traits<char>::eof()) {
        SkeletonSequence clip;
        clip.id = binary::read_string(is, "clip id");
        clip.fps = binary::read_le<float>(is, "fps");
        const auto frames = binary::read_le<std::uint32_t>(is, "frame count");
        const auto keypoints = binary::read_le<std::uint32_t>(is, "keypoint count");
        if (frames == 0 || keypoints == 0 || keypoints > 4096 || frames > (1u << 22)) {
            throw std::runtime_error(path.string() + ": implausible record header for clip '" + clip.id + "'");
        }
        clip.coords.resize(frames, 2 * keypoints);
        clip.confidence.resize(frames, keypoints);
        for (std::uint32_t f = 0; f < frames; ++f) {
            for (std::uint32_t j = 0; j < keypoints; ++j) {
                clip.coords(f, 2 * j) = binary::read_le<float>(is, "keypoint x");
                clip.coords(f, 2 * j + 1) = binary::read_le<float>(is, "keypoint y");
                clip.confidence(f, j) = binary::read_le<float>(is, "keypoint confidence");
            }
        }
        try {
            validate(clip, -1);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path.string() + ", clip '" + clip.id + "': " + e.what());
        }
        clips.push_back(std::move(clip));
    }
    return clips;
}

std::vector<SkeletonManifestEntry> read_skeleton_manifest(const fs::path& manifest) {
    std::ifstream is(manifest);
    if (!is) {
        throw std::runtime_error("cannot open skeleton manifest " + manifest.string());
    }
    std::vector<SkeletonManifestEntry> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(manifest.string() + ": malformed line '" + line + "'");
        }
        out.push_back({line.substr(0, tab), std::stoi(line.substr(tab + 1))});
    }
    return out;
}

}  // namespace skelgen
