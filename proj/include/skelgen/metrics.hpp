#pragma once

#include "skelgen/image.hpp"
#include "skelgen/skeleton.hpp"

#include <vector>

namespace skelgen {

// Windowed SSIM on unit dynamic range: 11x11 Gaussian window (sigma 1.5),
// C1 = 0.01^2, C2 = 0.03^2, population (co)variances, averaged over every
// window position that lies fully inside the image. Both sides need at
// least 11 pixels.
double ssim(const Matrix& a, const Matrix& b);
// Multi-channel: mean of the per-channel values.
double ssim(const std::vector<Matrix>& a, const std::vector<Matrix>& b);
double ssim(const Image& a, const Image& b);

inline constexpr double kPsnrCap = 100.0;

// 10 log10(1 / mse), capped at kPsnrCap (also returned for mse == 0).
double psnr_from_mse(double mse);
double psnr(const Matrix& a, const Matrix& b);
double psnr(const std::vector<Matrix>& a, const std::vector<Matrix>& b);
double psnr(const Image& a, const Image& b);

struct PjpeResult {
    Vector per_joint;  // mean Euclidean error of each keypoint over frames
    double mean = 0.0;
};

PjpeResult pjpe(const SkeletonSequence& a, const SkeletonSequence& b);

}  // namespace skelgen
