#include "skelgen/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace skelgen {

namespace {

using namespace wholebody;

void put(SkeletonFrame& fr, int k, double x, double y) {
    fr.coords(k, 0) = x;
    fr.coords(k, 1) = y;
}

// 21-point hand fanning out below the wrist. `side` is +1 for the hand on the
// image right.
void put_hand(SkeletonFrame& fr, int begin, double wx, double wy, double side, double s) {
    put(fr, begin, wx, wy);
    for (int finger = 0; finger < 5; ++finger) {
        const double angle = std::numbers::pi / 2 + side * (finger - 2) * 0.25;
        for (int joint = 0; joint < 4; ++joint) {
            const double r = s * (0.025 + 0.018 * joint) * (finger == 0 ? 0.8 : 1.0);
            put(fr, begin + 1 + finger * 4 + joint, wx + r * std::cos(angle), wy + r * std::sin(angle));
        }
    }
}

}  // namespace

SkeletonFrame template_pose(const SpeakerShape& shape) {
    if (!(shape.shoulder_width > 0.0)) {
        throw std::invalid_argument("template_pose: shoulder_width must be positive");
    }
    SkeletonFrame fr;
    fr.coords.setZero(kNumKeypoints, 2);
    fr.confidence.setOnes(kNumKeypoints);
    const double cx = shape.center_x, sy = shape.shoulder_y;
    const double hw = shape.shoulder_width / 2.0;
    const double s = shape.shoulder_width / 0.25;  // limb lengths scale with the frame

    const double nose_y = sy - 0.15 * s;
    put(fr, kNose, cx, nose_y);
    put(fr, 1, cx + 0.02 * s, nose_y - 0.02 * s);
    put(fr, 2, cx - 0.02 * s, nose_y - 0.02 * s);
    put(fr, 3, cx + 0.045 * s, nose_y - 0.01 * s);
    put(fr, 4, cx - 0.045 * s, nose_y - 0.01 * s);
    put(fr, kLeftShoulder, cx + hw, sy);
    put(fr, kRightShoulder, cx - hw, sy);
    put(fr, kLeftElbow, cx + hw + 0.03 * s, sy + 0.13 * s);
    put(fr, kRightElbow, cx - hw - 0.03 * s, sy + 0.13 * s);
    put(fr, kLeftWrist, cx + hw + 0.01 * s, sy + 0.25 * s);
    put(fr, kRightWrist, cx - hw - 0.01 * s, sy + 0.25 * s);
    put(fr, 11, cx + 0.7 * hw, sy + 0.28 * s);
    put(fr, 12, cx - 0.7 * hw, sy + 0.28 * s);
    put(fr, 13, cx + 0.7 * hw, sy + 0.45 * s);
    put(fr, 14, cx - 0.7 * hw, sy + 0.45 * s);
    put(fr, 15, cx + 0.7 * hw, sy + 0.62 * s);
    put(fr, 16, cx - 0.7 * hw, sy + 0.62 * s);
    // feet: big toe, small toe, heel
    put(fr, 17, cx + 0.7 * hw + 0.01 * s, sy + 0.65 * s);
    put(fr, 18, cx + 0.7 * hw + 0.03 * s, sy + 0.65 * s);
    put(fr, 19, cx + 0.7 * hw, sy + 0.63 * s);
    put(fr, 20, cx - 0.7 * hw - 0.01 * s, sy + 0.65 * s);
    put(fr, 21, cx - 0.7 * hw - 0.03 * s, sy + 0.65 * s);
    put(fr, 22, cx - 0.7 * hw, sy + 0.63 * s);

    // 68-point face around the nose.
    const int f0 = kFaceBegin;
    const double fw = 0.05 * s, fh = 0.065 * s;
    for (int i = 0; i <= 16; ++i) {  // jaw
        const double a = std::numbers::pi * i / 16.0;
        put(fr, f0 + i, cx + fw * std::cos(a), nose_y + 0.4 * fh * std::sin(a));
    }
    for (int i = 0; i < 10; ++i) {  // brows
        const double side = i < 5 ? -1.0 : 1.0;
        const int j = i % 5;
        put(fr, f0 + 17 + i, cx + side * (0.01 + 0.008 * (side < 0 ? 4 - j : j)) * s, nose_y - 0.035 * s);
    }
    for (int i = 0; i < 9; ++i) {  // nose bridge and base
        if (i < 4) {
            put(fr, f0 + 27 + i, cx, nose_y - 0.025 * s + 0.007 * i * s);
        } else {
            put(fr, f0 + 27 + i, cx + (i - 6) * 0.006 * s, nose_y + 0.005 * s);
        }
    }
    for (int e = 0; e < 2; ++e) {  // eyes
        const double ex = cx + (e == 0 ? -0.02 : 0.02) * s;
        for (int i = 0; i < 6; ++i) {
            const double a = 2.0 * std::numbers::pi * i / 6.0;
            put(fr, f0 + 36 + 6 * e + i, ex + 0.008 * s * std::cos(a), nose_y - 0.02 * s + 0.003 * s * std::sin(a));
        }
    }
    const double my = nose_y + 0.025 * s;
    for (int i = 0; i < 12; ++i) {  // outer lip
        const double a = 2.0 * std::numbers::pi * i / 12.0;
        put(fr, f0 + 48 + i, cx - 0.015 * s * std::cos(a), my + 0.006 * s * std::sin(a));
    }
    for (int i = 0; i < 8; ++i) {  // inner lip
        const double a = 2.0 * std::numbers::pi * i / 8.0;
        put(fr, f0 + 60 + i, cx - 0.01 * s * std::cos(a), my + 0.003 * s * std::sin(a));
    }

    put_hand(fr, kLeftHandBegin, fr.coords(kLeftWrist, 0), fr.coords(kLeftWrist, 1), 1.0, s);
    put_hand(fr, kRightHandBegin, fr.coords(kRightWrist, 0), fr.coords(kRightWrist, 1), -1.0, s);
    return fr;
}

SkeletonSequence animate(const SpeakerShape& shape, const Matrix& frame_audio, const MotionRig& rig,
                         const std::string& id) {
    const auto frames = static_cast<int>(frame_audio.rows());
    const auto cols = static_cast<int>(frame_audio.cols());
    if (frames < 1 || cols < 1) {
        throw std::invalid_argument("animate: empty audio");
    }
    if (rig.signal_dim < 0 || rig.signal_dim >= cols) {
        throw std::invalid_argument("animate: signal_dim outside the feature width");
    }
    const auto rest = template_pose(shape);
    auto col = [&](int k) { return (rig.signal_dim + k) % cols; };

    std::vector<SkeletonFrame> out;
    out.reserve(frames);
    for (int f = 0; f < frames; ++f) {
        SkeletonFrame fr = rest;
        const double right_dy = rig.wrist_gain * frame_audio(f, col(0));
        const double left_dx = rig.secondary_gain * frame_audio(f, col(1));
        const double head_dx = 0.5 * rig.secondary_gain * frame_audio(f, col(2));
        const double mouth = 0.2 * rig.secondary_gain * frame_audio(f, col(3));

        fr.coords(kRightElbow, 1) += 0.5 * right_dy;
        for (int k = kRightHandBegin; k < kRightHandBegin + kHandKeypoints; ++k) {
            fr.coords(k, 1) += right_dy;
        }
        fr.coords(kRightWrist, 1) += right_dy;

        fr.coords(kLeftElbow, 0) += 0.5 * left_dx;
        for (int k = kLeftHandBegin; k < kLeftHandBegin + kHandKeypoints; ++k) {
            fr.coords(k, 0) += left_dx;
        }
        fr.coords(kLeftWrist, 0) += left_dx;

        for (int k = 0; k <= 4; ++k) {
            fr.coords(k, 0) += head_dx;
        }
        for (int k = kFaceBegin; k < kLeftHandBegin; ++k) {
            fr.coords(k, 0) += head_dx;
        }
        // Lower lip (outer 55-59 region and inner 64-67) drops with the mouth signal.
        for (int k = kMouthBegin + 7; k <= kMouthBegin + 11; ++k) {
            fr.coords(k, 1) += mouth;
        }
        for (int k = kMouthBegin + 16; k < kMouthEnd; ++k) {
            fr.coords(k, 1) += mouth;
        }
        out.push_back(std::move(fr));
    }
    auto seq = SkeletonSequence::from_frames(out);
    seq.id = id;
    return seq;
}

std::vector<double> right_wrist_offset(const SkeletonSequence& seq, const SpeakerShape& shape) {
    const auto rest = template_pose(shape);
    std::vector<double> out(static_cast<std::size_t>(seq.num_frames()));
    for (int f = 0; f < seq.num_frames(); ++f) {
        out[f] = seq.coords(f, 2 * kRightWrist + 1) - rest.coords(kRightWrist, 1);
    }
    return out;
}

std::vector<RawClip> synthetic_corpus(const SyntheticCorpusOptions& o) {
    if (o.clips < 1 || o.frames < 1 || o.speakers.empty()) {
        throw std::invalid_argument("synthetic_corpus: need at least one clip, frame and speaker");
    }
    std::vector<RawClip> out;
    for (std::size_t s = 0; s < o.speakers.size(); ++s) {
        for (int i = 0; i < o.clips; ++i) {
            const std::uint64_t audio_seed = o.seed * 1000003ULL + static_cast<std::uint64_t>(i) +
                                             (o.shared_audio ? 0 : 7919ULL * (s + 1));
            const auto raw = synthetic_features(2 * o.frames, audio_seed);
            RawClip clip;
            clip.audio = align_to_frames(raw, o.frames);
            clip.skeleton = animate(o.speakers[s], clip.audio.values, o.rig,
                                    "s" + std::to_string(s) + "_c" + std::to_string(i));
            out.push_back(std::move(clip));
        }
    }
    return out;
}

std::vector<ColorHistogram> synthetic_shot_video(int total_frames, const std::vector<int>& cuts, std::uint64_t seed) {
    if (total_frames < 1) {
        throw std::invalid_argument("synthetic_shot_video: total_frames must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> level(30.0, 225.0);
    std::uniform_real_distribution<double> noise(-20.0, 20.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    std::array<double, 3> base{level(rng), level(rng), level(rng)};
    auto next_base = [&] {
        for (;;) {
            std::array<double, 3> b{level(rng), level(rng), level(rng)};
            int far = 0;
            for (int c = 0; c < 3; ++c) {
                far += std::abs(b[c] - base[c]) >= 80.0 ? 1 : 0;
            }
            if (far >= 2) {
                return b;
            }
        }
    };

    std::vector<ColorHistogram> out;
    out.reserve(static_cast<std::size_t>(total_frames));
    std::size_t next_cut = 0;
    int shot_start = 0;
    double ph = phase(rng);
    std::vector<std::uint8_t> rgb(16 * 16 * 3);
    for (int f = 0; f < total_frames; ++f) {
        while (next_cut < cuts.size() && cuts[next_cut] <= f) {
            if (cuts[next_cut] == f && f > 0) {
                base = next_base();
                shot_start = f;
                ph = phase(rng);
            }
            ++next_cut;
        }
        const double drift = 10.0 * std::sin(ph + 0.05 * (f - shot_start));
        for (std::size_t i = 0; i < rgb.size(); ++i) {
            const double v = base[i % 3] + drift + noise(rng);
            rgb[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
        out.push_back(color_histogram(rgb));
    }
    return out;
}

}  // namespace skelgen
