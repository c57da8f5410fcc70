#include "skelgen/audio_features.hpp"

#include "skelgen/binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace skelgen {

namespace fs = std::filesystem;

void save_features(const fs::path& path, const AudioFeatureSequence& feat) {
    if (feat.values.cols() != kAudioDim) {
        throw std::invalid_argument("feature matrix must have 768 columns");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os.write(kFeatureMagic, 8);
    binary::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(feat.values.rows()));
    binary::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(feat.values.cols()));
    binary::write_le<float>(os, static_cast<float>(feat.source_rate));
    for (Eigen::Index r = 0; r < feat.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < feat.values.cols(); ++c) {
            binary::write_le<float>(os, static_cast<float>(feat.values(r, c)));
        }
    }
    if (!os) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

AudioFeatureSequence load_features(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open feature file " + path.string());
    }
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kFeatureMagic, 8) != 0) {
        throw std::runtime_error(path.string() + ": bad feature file header");
    }
    const auto rows = binary::read_le<std::uint32_t>(is, "row count");
    const auto cols = binary::read_le<std::uint32_t>(is, "column count");
    const auto rate = binary::read_le<float>(is, "source rate");
    if (cols != kAudioDim) {
        throw std::runtime_error(path.string() + ": feature dimension " + std::to_string(cols) +
                                 ", expected 768");
    }
    if (rows == 0 || rows > (1u << 24)) {
        throw std::runtime_error(path.string() + ": implausible row count " + std::to_string(rows));
    }
    if (!std::isfinite(rate) || rate <= 0.0f) {
        throw std::runtime_error(path.string() + ": invalid source rate");
    }
    AudioFeatureSequence feat;
    feat.source_rate = rate;
    feat.values.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            const float v = binary::read_le<float>(is, "feature value");
            if (!std::isfinite(v)) {
                throw std::runtime_error(path.string() + ": non-finite value at row " + std::to_string(r) +
                                         ", column " + std::to_string(c));
            }
            feat.values(r, c) = v;
        }
    }
    return feat;
}

AudioFeatureSequence align_to_frames(const AudioFeatureSequence& feat, int frames, double fps) {
    if (feat.values.rows() < 1) {
        throw std::invalid_argument("align_to_frames: empty feature sequence");
    }
    if (frames < 1) {
        throw std::invalid_argument("align_to_frames: frame count must be >= 1");
    }
    const auto n = feat.values.rows();
    AudioFeatureSequence out;
    out.source_rate = fps;
    out.values.resize(frames, feat.values.cols());
    for (int f = 0; f < frames; ++f) {
        const double t = (f + 0.5) / fps;
        const double u = std::clamp(t * feat.source_rate - 0.5, 0.0, static_cast<double>(n - 1));
        const auto i0 = static_cast<Eigen::Index>(std::floor(u));
        const auto i1 = std::min(i0 + 1, n - 1);
        const double w = u - static_cast<double>(i0);
        if (w == 0.0) {
            out.values.row(f) = feat.values.row(i0);
        } else {
            out.values.row(f) = (1.0 - w) * feat.values.row(i0) + w * feat.values.row(i1);
        }
    }
    return out;
}

int frames_for_duration(const AudioFeatureSequence& feat, double fps) {
    // Tolerate float rates like 49.999996 read back from disk.
    return static_cast<int>(std::floor(fps * feat.duration_seconds() + 1e-9));
}

FeatureReport validate(const AudioFeatureSequence& feat, int expected_frames) {
    FeatureReport report;
    if (feat.values.cols() != kAudioDim) {
        report.issues.push_back({FeatureIssue::Kind::Shape, "feature dimension is " +
                                                                std::to_string(feat.values.cols()) +
                                                                ", expected 768"});
    }
    if (feat.values.rows() != expected_frames) {
        report.issues.push_back({FeatureIssue::Kind::Length, "feature rows " +
                                                                 std::to_string(feat.values.rows()) +
                                                                 " do not match frame count " +
                                                                 std::to_string(expected_frames)});
    }
    for (Eigen::Index r = 0; r < feat.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < feat.values.cols(); ++c) {
            if (!std::isfinite(feat.values(r, c))) {
                report.issues.push_back({FeatureIssue::Kind::NonFinite, "non-finite value at row " +
                                                                            std::to_string(r) + ", column " +
                                                                            std::to_string(c)});
            }
        }
    }
    return report;
}

AudioFeatureSequence synthetic_features(int rows, std::uint64_t seed, double source_rate, double step) {
    if (rows < 1) {
        throw std::invalid_argument("synthetic_features: rows must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    AudioFeatureSequence feat;
    feat.source_rate = source_rate;
    feat.values.resize(rows, kAudioDim);
    for (int c = 0; c < kAudioDim; ++c) {
        feat.values(0, c) = normal(rng);
    }
    for (int r = 1; r < rows; ++r) {
        for (int c = 0; c < kAudioDim; ++c) {
            // Mean-reverting walk keeps long tracks bounded.
            feat.values(r, c) = 0.98 * feat.values(r - 1, c) + step * normal(rng);
        }
    }
    return feat;
}

}  // namespace skelgen
