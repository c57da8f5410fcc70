#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace skelgen {

// Row-major dense matrix used for every sequence-shaped tensor (frames x features).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using Vector = Eigen::VectorXd;

// COCO-WholeBody layout.
inline constexpr int kNumKeypoints = 133;
inline constexpr int kMotionDim = 2 * kNumKeypoints;  // 266
inline constexpr int kAudioDim = 768;
inline constexpr double kFps = 25.0;

namespace wholebody {
inline constexpr int kNose = 0;
inline constexpr int kLeftShoulder = 5;
inline constexpr int kRightShoulder = 6;
inline constexpr int kLeftElbow = 7;
inline constexpr int kRightElbow = 8;
inline constexpr int kLeftWrist = 9;
inline constexpr int kRightWrist = 10;
inline constexpr int kBodyBegin = 0;    // body 0-16, feet 17-22
inline constexpr int kFaceBegin = 23;   // 68 face landmarks
inline constexpr int kLeftHandBegin = 91;
inline constexpr int kRightHandBegin = 112;
inline constexpr int kHandKeypoints = 21;
inline constexpr int kMouthBegin = 71;  // face landmarks 48-67
inline constexpr int kMouthEnd = 91;    // exclusive
}  // namespace wholebody

}  // namespace skelgen
