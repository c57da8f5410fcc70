#include "skelgen/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skelgen {

namespace {

constexpr int kRadius = 5;
constexpr double kSigma = 1.5;

std::array<double, 2 * kRadius + 1> gaussian_taps() {
    std::array<double, 2 * kRadius + 1> w{};
    double sum = 0.0;
    for (int i = -kRadius; i <= kRadius; ++i) {
        w[i + kRadius] = std::exp(-0.5 * i * i / (kSigma * kSigma));
        sum += w[i + kRadius];
    }
    for (auto& v : w) {
        v /= sum;
    }
    return w;
}

// Separable weighted sum over each fully-contained window: output is
// (H - 10) x (W - 10).
Matrix window_filter(const Matrix& m) {
    static const auto w = gaussian_taps();
    const Eigen::Index h = m.rows(), wd = m.cols();
    const Eigen::Index oh = h - 2 * kRadius, ow = wd - 2 * kRadius;
    Matrix rows(h, ow);
    for (Eigen::Index y = 0; y < h; ++y) {
        for (Eigen::Index x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k <= 2 * kRadius; ++k) {
                s += w[k] * m(y, x + k);
            }
            rows(y, x) = s;
        }
    }
    Matrix out(oh, ow);
    for (Eigen::Index y = 0; y < oh; ++y) {
        for (Eigen::Index x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k <= 2 * kRadius; ++k) {
                s += w[k] * rows(y + k, x);
            }
            out(y, x) = s;
        }
    }
    return out;
}

void check_pair(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
    if (!a.allFinite() || !b.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite pixel");
    }
}

std::vector<Matrix> planes(const Image& img) {
    std::vector<Matrix> out;
    for (int c = 0; c < img.channels; ++c) {
        out.push_back(channel_plane(img, c));
    }
    return out;
}

void check_planes(const std::vector<Matrix>& a, const std::vector<Matrix>& b, const char* what) {
    if (a.empty() || a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": channel count mismatch");
    }
}

}  // namespace

double ssim(const Matrix& a, const Matrix& b) {
    check_pair(a, b, "ssim");
    if (a.rows() < 2 * kRadius + 1 || a.cols() < 2 * kRadius + 1) {
        throw std::invalid_argument("ssim: images must be at least 11 x 11");
    }
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    const Matrix mu_a = window_filter(a);
    const Matrix mu_b = window_filter(b);
    const Matrix aa = window_filter(a.cwiseProduct(a));
    const Matrix bb = window_filter(b.cwiseProduct(b));
    const Matrix ab = window_filter(a.cwiseProduct(b));
    const auto ma = mu_a.array(), mb = mu_b.array();
    const auto var_a = aa.array() - ma * ma;
    const auto var_b = bb.array() - mb * mb;
    const auto cov = ab.array() - ma * mb;
    const auto num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
    const auto den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
    return (num / den).mean();
}

double ssim(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    check_planes(a, b, "ssim");
    double sum = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        sum += ssim(a[c], b[c]);
    }
    return sum / static_cast<double>(a.size());
}

double ssim(const Image& a, const Image& b) {
    return ssim(planes(a), planes(b));
}

double psnr_from_mse(double mse) {
    if (!(mse >= 0.0)) {
        throw std::invalid_argument("psnr: mse must be >= 0");
    }
    if (mse == 0.0) {
        return kPsnrCap;
    }
    return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

double psnr(const Matrix& a, const Matrix& b) {
    check_pair(a, b, "psnr");
    return psnr_from_mse((a - b).array().square().mean());
}

double psnr(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    check_planes(a, b, "psnr");
    double sum = 0.0;
    double count = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        check_pair(a[c], b[c], "psnr");
        sum += (a[c] - b[c]).array().square().sum();
        count += static_cast<double>(a[c].size());
    }
    return psnr_from_mse(sum / count);
}

double psnr(const Image& a, const Image& b) {
    return psnr(planes(a), planes(b));
}

PjpeResult pjpe(const SkeletonSequence& a, const SkeletonSequence& b) {
    if (a.coords.rows() != b.coords.rows() || a.coords.cols() != b.coords.cols()) {
        throw std::invalid_argument("pjpe: sequences differ in frame or keypoint count");
    }
    const auto frames = a.coords.rows();
    const auto k = a.coords.cols() / 2;
    if (frames == 0 || k == 0) {
        throw std::invalid_argument("pjpe: empty sequence");
    }
    PjpeResult r;
    r.per_joint = Vector::Zero(k);
    for (Eigen::Index f = 0; f < frames; ++f) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const double dx = a.coords(f, 2 * j) - b.coords(f, 2 * j);
            const double dy = a.coords(f, 2 * j + 1) - b.coords(f, 2 * j + 1);
            r.per_joint(j) += std::hypot(dx, dy);
        }
    }
    r.per_joint /= static_cast<double>(frames);
    r.mean = r.per_joint.mean();
    return r;
}

}  // namespace skelgen
