#include "skelgen/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace skelgen {

SkeletonFrame SkeletonSequence::frame(int f) const {
    const int k = num_keypoints();
    SkeletonFrame out;
    out.coords.resize(k, 2);
    out.confidence = confidence.row(f).transpose();
    for (int j = 0; j < k; ++j) {
        out.coords(j, 0) = coords(f, 2 * j);
        out.coords(j, 1) = coords(f, 2 * j + 1);
    }
    return out;
}

void SkeletonSequence::set_frame(int f, const SkeletonFrame& frame) {
    const int k = num_keypoints();
    if (frame.num_keypoints() != k || frame.confidence.size() != k) {
        throw std::invalid_argument("set_frame: keypoint count mismatch");
    }
    for (int j = 0; j < k; ++j) {
        coords(f, 2 * j) = frame.coords(j, 0);
        coords(f, 2 * j + 1) = frame.coords(j, 1);
    }
    confidence.row(f) = frame.confidence.transpose();
}

SkeletonSequence SkeletonSequence::zeros(int frames, int keypoints) {
    SkeletonSequence s;
    s.coords = Matrix::Zero(frames, 2 * keypoints);
    s.confidence = Matrix::Zero(frames, keypoints);
    return s;
}

SkeletonSequence SkeletonSequence::from_frames(const std::vector<SkeletonFrame>& frames) {
    if (frames.empty()) {
        throw std::invalid_argument("from_frames: empty frame list");
    }
    auto s = zeros(static_cast<int>(frames.size()), frames.front().num_keypoints());
    for (std::size_t f = 0; f < frames.size(); ++f) {
        s.set_frame(static_cast<int>(f), frames[f]);
    }
    return s;
}

void validate(const SkeletonSequence& seq, int expected_keypoints) {
    const int k = seq.num_keypoints();
    if (seq.num_frames() < 1) {
        throw std::invalid_argument("skeleton sequence has no frames");
    }
    if (expected_keypoints >= 0 && k != expected_keypoints) {
        throw std::invalid_argument("skeleton sequence has " + std::to_string(k) + " keypoints, expected " +
                                    std::to_string(expected_keypoints));
    }
    if (seq.coords.cols() != 2 * k || seq.confidence.rows() != seq.coords.rows()) {
        throw std::invalid_argument("skeleton sequence coordinate/confidence shapes disagree");
    }
    if (!seq.coords.allFinite()) {
        throw std::invalid_argument("skeleton sequence has non-finite coordinates");
    }
    if (!seq.confidence.allFinite() || seq.confidence.minCoeff() < 0.0 || seq.confidence.maxCoeff() > 1.0) {
        throw std::invalid_argument("skeleton confidence outside [0, 1]");
    }
}

std::array<PartGroup, kNumKeypoints> RootMap::default_groups() {
    std::array<PartGroup, kNumKeypoints> g{};
    for (int i = 0; i < kNumKeypoints; ++i) {
        if (i < wholebody::kFaceBegin) {
            g[i] = PartGroup::Body;
        } else if (i < wholebody::kLeftHandBegin) {
            g[i] = PartGroup::Face;
        } else if (i < wholebody::kRightHandBegin) {
            g[i] = PartGroup::LeftHand;
        } else {
            g[i] = PartGroup::RightHand;
        }
    }
    return g;
}

int RootMap::root_of(int keypoint) const {
    switch (groups[keypoint]) {
        case PartGroup::Face: return face_root;
        case PartGroup::LeftHand: return left_hand_root;
        case PartGroup::RightHand: return right_hand_root;
        case PartGroup::Body: break;
    }
    return -1;  // body root (derived point)
}

void validate(const RootMap& roots) {
    for (int r : {roots.face_root, roots.left_hand_root, roots.right_hand_root, roots.body_root_a,
                  roots.body_root_b}) {
        if (r < 0 || r >= kNumKeypoints) {
            throw std::invalid_argument("root index " + std::to_string(r) + " out of range");
        }
        if (roots.groups[r] != PartGroup::Body) {
            throw std::invalid_argument("root index " + std::to_string(r) + " is not a body keypoint");
        }
    }
}

namespace {

void check_motion_shape(const SkeletonSequence& seq) {
    validate(seq, kNumKeypoints);
}

}  // namespace

LocalMotionSequence to_local(const SkeletonSequence& seq, const RootMap& roots) {
    check_motion_shape(seq);
    validate(roots);
    const int frames = seq.num_frames();
    const int a = roots.body_root_a;
    const int b = roots.body_root_b;

    LocalMotionSequence out;
    out.root_map = roots;
    out.values.resize(frames, kMotionDim);
    for (int f = 0; f < frames; ++f) {
        auto p = [&](int j, int c) { return seq.coords(f, 2 * j + c); };
        const double rx = 0.5 * (p(a, 0) + p(b, 0));
        const double ry = 0.5 * (p(a, 1) + p(b, 1));
        for (int j = 0; j < kNumKeypoints; ++j) {
            const int root = roots.root_of(j);
            const double ox = root < 0 ? rx : p(root, 0);
            const double oy = root < 0 ? ry : p(root, 1);
            out.values(f, 2 * j) = p(j, 0) - ox;
            out.values(f, 2 * j + 1) = p(j, 1) - oy;
        }
        out.values(f, 2 * a) = rx;
        out.values(f, 2 * a + 1) = ry;
    }
    return out;
}

SkeletonSequence from_local(const LocalMotionSequence& lm, const RootMap& roots) {
    if (!(lm.root_map == roots)) {
        throw std::invalid_argument("from_local: root map differs from the one used to encode");
    }
    validate(roots);
    if (lm.values.cols() != kMotionDim || lm.values.rows() < 1) {
        throw std::invalid_argument("from_local: expected F x " + std::to_string(kMotionDim) + " values");
    }
    if (!lm.values.allFinite()) {
        throw std::invalid_argument("from_local: non-finite values");
    }
    const int frames = lm.num_frames();
    const int a = roots.body_root_a;
    const int b = roots.body_root_b;

    auto seq = SkeletonSequence::zeros(frames);
    seq.confidence.setOnes();
    for (int f = 0; f < frames; ++f) {
        auto v = [&](int j, int c) { return lm.values(f, 2 * j + c); };
        auto& xy = seq.coords;
        const double rx = v(a, 0);
        const double ry = v(a, 1);
        // Body group first: part roots must be placed before their children.
        for (int j = 0; j < kNumKeypoints; ++j) {
            if (roots.groups[j] != PartGroup::Body || j == a) {
                continue;
            }
            xy(f, 2 * j) = rx + v(j, 0);
            xy(f, 2 * j + 1) = ry + v(j, 1);
        }
        if (a == b) {
            xy(f, 2 * a) = rx;
            xy(f, 2 * a + 1) = ry;
        } else {
            xy(f, 2 * a) = 2.0 * rx - xy(f, 2 * b);
            xy(f, 2 * a + 1) = 2.0 * ry - xy(f, 2 * b + 1);
        }
        for (int j = 0; j < kNumKeypoints; ++j) {
            if (roots.groups[j] == PartGroup::Body) {
                continue;
            }
            const int root = roots.root_of(j);
            xy(f, 2 * j) = xy(f, 2 * root) + v(j, 0);
            xy(f, 2 * j + 1) = xy(f, 2 * root + 1) + v(j, 1);
        }
    }
    return seq;
}

MotionEncoding parse_motion_encoding(const std::string& name) {
    if (name == "local") {
        return MotionEncoding::Local;
    }
    if (name == "global") {
        return MotionEncoding::Global;
    }
    throw std::invalid_argument("unknown motion encoding '" + name + "' (expected local or global)");
}

std::string to_string(MotionEncoding encoding) {
    return encoding == MotionEncoding::Local ? "local" : "global";
}

Matrix encode_motion(const SkeletonSequence& seq, MotionEncoding encoding, const RootMap& roots) {
    if (encoding == MotionEncoding::Local) {
        return to_local(seq, roots).values;
    }
    check_motion_shape(seq);
    return seq.coords;
}

SkeletonSequence decode_motion(const Matrix& values, MotionEncoding encoding, const RootMap& roots) {
    if (encoding == MotionEncoding::Local) {
        return from_local(LocalMotionSequence{values, roots}, roots);
    }
    if (values.cols() != kMotionDim || values.rows() < 1 || !values.allFinite()) {
        throw std::invalid_argument("decode_motion: expected finite F x 266 values");
    }
    auto seq = SkeletonSequence::zeros(static_cast<int>(values.rows()));
    seq.coords = values;
    seq.confidence.setOnes();
    return seq;
}

std::vector<int> mouth_indices() {
    std::vector<int> idx;
    for (int i = wholebody::kMouthBegin; i < wholebody::kMouthEnd; ++i) {
        idx.push_back(i);
    }
    return idx;
}

SkeletonSequence smooth(const SkeletonSequence& seq, int window, const std::vector<int>& exclude) {
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("smoothing window must be a positive odd integer, got " +
                                    std::to_string(window));
    }
    validate(seq, -1);
    const int frames = seq.num_frames();
    const int k = seq.num_keypoints();
    const int half = window / 2;

    std::vector<bool> keep(k, false);
    for (int i : exclude) {
        if (i < 0 || i >= k) {
            throw std::invalid_argument("smoothing exclusion index out of range");
        }
        keep[i] = true;
    }

    SkeletonSequence out = seq;
    for (int col = 0; col < 2 * k; ++col) {
        if (keep[col / 2]) {
            continue;
        }
        for (int f = 0; f < frames; ++f) {
            const int lo = std::max(0, f - half);
            const int hi = std::min(frames - 1, f + half);
            double sum = 0.0;
            for (int g = lo; g <= hi; ++g) {
                sum += seq.coords(g, col);
            }
            out.coords(f, col) = sum / static_cast<double>(hi - lo + 1);
        }
    }
    return out;
}

SkeletonSequence smooth(const SkeletonSequence& seq, int window) {
    return smooth(seq, window, mouth_indices());
}

NormalizationStats fit_normalization(const std::vector<Matrix>& corpus) {
    if (corpus.empty()) {
        throw std::invalid_argument("fit_normalization: empty corpus");
    }
    const auto dim = corpus.front().cols();
    RowVector sum = RowVector::Zero(dim);
    double count = 0.0;
    for (const auto& m : corpus) {
        if (m.cols() != dim) {
            throw std::invalid_argument("fit_normalization: dimension mismatch within corpus");
        }
        sum += m.colwise().sum();
        count += static_cast<double>(m.rows());
    }
    if (count == 0.0) {
        throw std::invalid_argument("fit_normalization: corpus has no frames");
    }
    NormalizationStats stats;
    stats.mean = sum / count;
    RowVector sq = RowVector::Zero(dim);
    for (const auto& m : corpus) {
        sq += (m.rowwise() - stats.mean).array().square().matrix().colwise().sum();
    }
    stats.std = (sq / count).array().sqrt().max(kStdFloor).matrix();
    return stats;
}

NormalizationStats fit_normalization(const std::vector<LocalMotionSequence>& corpus) {
    std::vector<Matrix> values;
    values.reserve(corpus.size());
    for (const auto& lm : corpus) {
        values.push_back(lm.values);
    }
    return fit_normalization(values);
}

namespace {

void check_stats(const Matrix& values, const NormalizationStats& stats) {
    if (stats.mean.size() != values.cols() || stats.std.size() != values.cols()) {
        throw std::invalid_argument("normalization stats have dimension " + std::to_string(stats.mean.size()) +
                                    ", values have " + std::to_string(values.cols()));
    }
}

}  // namespace

Matrix normalize(const Matrix& values, const NormalizationStats& stats) {
    check_stats(values, stats);
    return ((values.rowwise() - stats.mean).array().rowwise() / stats.std.array()).matrix();
}

Matrix denormalize(const Matrix& values, const NormalizationStats& stats) {
    check_stats(values, stats);
    return ((values.array().rowwise() * stats.std.array()).rowwise() + stats.mean.array()).matrix();
}

LocalMotionSequence normalize(const LocalMotionSequence& lm, const NormalizationStats& stats) {
    return {normalize(lm.values, stats), lm.root_map};
}

LocalMotionSequence denormalize(const LocalMotionSequence& lm, const NormalizationStats& stats) {
    return {denormalize(lm.values, stats), lm.root_map};
}

SkeletonSequence extract_hand_skeletons(const SkeletonSequence& seq) {
    validate(seq, kNumKeypoints);
    constexpr int begin = wholebody::kLeftHandBegin;
    constexpr int count = 2 * wholebody::kHandKeypoints;
    SkeletonSequence out;
    out.id = seq.id;
    out.fps = seq.fps;
    out.coords = seq.coords.middleCols(2 * begin, 2 * count);
    out.confidence = seq.confidence.middleCols(begin, count);
    return out;
}

double shoulder_width(const SkeletonFrame& frame) {
    const auto d = frame.coords.row(wholebody::kLeftShoulder) - frame.coords.row(wholebody::kRightShoulder);
    return d.norm();
}

}  // namespace skelgen
