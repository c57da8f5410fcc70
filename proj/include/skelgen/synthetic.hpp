#pragma once

#include "skelgen/audio_features.hpp"
#include "skelgen/dataset_tools.hpp"
#include "skelgen/skeleton.hpp"
#include "skelgen/trainer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace skelgen {

// Body shape of a synthetic speaker.
struct SpeakerShape {
    double shoulder_width = 0.25;
    double center_x = 0.5;
    double shoulder_y = 0.45;
};

// Front-facing rest pose, every confidence 1.
SkeletonFrame template_pose(const SpeakerShape& shape);

// How audio features drive the pose. Feature column `signal_dim` moves the
// right wrist vertically by `wrist_gain` per unit; a few other columns move
// the left wrist, the head and the mouth.
struct MotionRig {
    int signal_dim = 0;
    double wrist_gain = 0.05;
    double secondary_gain = 0.02;
};

// Deterministic: pose f is a fixed function of the rest pose and audio row f.
SkeletonSequence animate(const SpeakerShape& shape, const Matrix& frame_audio, const MotionRig& rig = {},
                         const std::string& id = "synthetic");

// Vertical offset of the right wrist from its rest position, per frame.
std::vector<double> right_wrist_offset(const SkeletonSequence& seq, const SpeakerShape& shape);

struct SyntheticCorpusOptions {
    int clips = 8;
    int frames = 32;
    std::vector<SpeakerShape> speakers{SpeakerShape{}};
    // When true every speaker gets the same audio tracks, so audio carries no
    // information about who is speaking.
    bool shared_audio = true;
    std::uint64_t seed = 1;
    MotionRig rig;
};

// clips * speakers.size() clips; clip i of speaker s is "s<s>_c<i>".
std::vector<RawClip> synthetic_corpus(const SyntheticCorpusOptions& options);

// Colour histograms of a synthetic 16x16 video: each shot has its own base
// colour that drifts slowly, with fresh per-pixel noise every frame. Shots
// start at 0 and at every cut; consecutive shots differ by at least 80 levels
// in two channels.
std::vector<ColorHistogram> synthetic_shot_video(int total_frames, const std::vector<int>& cuts, std::uint64_t seed);

}  // namespace skelgen
