#include "skelgen/metrics.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace skelgen;
using skelgen::testing::random_sequence;

namespace {

template <typename Fn>
Matrix image_from(int h, int w, Fn fn) {
    Matrix m(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            m(y, x) = fn(static_cast<double>(x), static_cast<double>(y));
        }
    }
    return m;
}

struct ReferencePair {
    Matrix a;
    Matrix b;
    double expected;
};

// Expected values frozen from scikit-image 0.25.2:
//   structural_similarity(a, b, gaussian_weights=True, sigma=1.5,
//                         use_sample_covariance=False, data_range=1.0)
std::vector<ReferencePair> reference_pairs() {
    const int h = 32, w = 40;
    std::vector<ReferencePair> out;
    out.push_back({image_from(h, w, [](double x, double y) { return 0.5 + 0.4 * std::sin(0.3 * x + 0.2 * y); }),
                   image_from(h, w, [](double x, double y) { return 0.5 + 0.4 * std::sin(0.3 * x + 0.2 * y + 0.5); }),
                   0.7603112516993127});
    out.push_back({image_from(h, w, [](double x, double y) { return std::fmod(x * 7 + y * 13, 17.0) / 16.0; }),
                   image_from(h, w, [](double x, double y) { return std::fmod(x * 5 + y * 11, 19.0) / 18.0; }),
                   -0.00933504707137299});
    out.push_back({image_from(h, w, [&](double x, double) { return x / (w - 1); }),
                   image_from(h, w,
                              [&](double x, double y) {
                                  return std::clamp(x / (w - 1) + 0.1 * std::cos(0.7 * x) * std::sin(0.5 * y), 0.0,
                                                    1.0);
                              }),
                   0.6223604863222718});
    return out;
}

}  // namespace

TEST_CASE("ssim: identity, anti-correlation and symmetry") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Matrix x = image_from(24, 30, [&](double, double) { return u(rng); });
    CHECK(ssim(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    const Matrix board = image_from(24, 24, [](double x, double y) {
        return (static_cast<int>(x) + static_cast<int>(y)) % 2 == 0 ? 1.0 : 0.0;
    });
    const Matrix inverted = (1.0 - board.array()).matrix();
    CHECK(ssim(board, inverted) < 0.0);

    const Matrix y = image_from(24, 30, [&](double, double) { return u(rng); });
    CHECK(std::abs(ssim(x, y) - ssim(y, x)) < 1e-9);
    CHECK(ssim(x, y) <= 1.0);
}

TEST_CASE("ssim matches the frozen reference values") {
    for (const auto& p : reference_pairs()) {
        CHECK(std::abs(ssim(p.a, p.b) - p.expected) < 1e-4);
    }
}

TEST_CASE("ssim errors") {
    CHECK_THROWS_AS(ssim(Matrix::Zero(20, 20), Matrix::Zero(20, 21)), std::invalid_argument);
    CHECK_THROWS_AS(ssim(Matrix::Zero(10, 20), Matrix::Zero(10, 20)), std::invalid_argument);
}

TEST_CASE("ssim over image channels averages the planes") {
    auto img = Image::filled(16, 16, 3, 0);
    auto other = img;
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            img.at(x, y, 0) = static_cast<std::uint8_t>((x * 16) % 256);
            other.at(x, y, 0) = static_cast<std::uint8_t>((y * 16) % 256);
        }
    }
    const double r = ssim(channel_plane(img, 0), channel_plane(other, 0));
    CHECK(ssim(img, other) == doctest::Approx((r + 1.0 + 1.0) / 3.0));
}

TEST_CASE("psnr") {
    CHECK(psnr_from_mse(0.01) == 20.0);
    CHECK(psnr_from_mse(1.0) == 0.0);
    CHECK(psnr_from_mse(0.0) == kPsnrCap);
    CHECK(psnr(Matrix::Constant(8, 8, 0.3), Matrix::Constant(8, 8, 0.3)) == kPsnrCap);
    CHECK(psnr(Matrix::Zero(8, 8), Matrix::Constant(8, 8, 0.1)) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(psnr(Matrix::Zero(4, 4), Matrix::Ones(4, 4)) == doctest::Approx(0.0));
    double prev = kPsnrCap + 1;
    for (double mse : {1e-12, 1e-6, 1e-3, 0.01, 0.1, 0.5, 1.0}) {
        const double p = psnr_from_mse(mse);
        CHECK(p < prev);
        prev = p;
    }
    CHECK_THROWS_AS(psnr(Matrix::Zero(4, 4), Matrix::Zero(4, 5)), std::invalid_argument);
}

TEST_CASE("pjpe") {
    std::mt19937_64 rng(3);
    const auto a = random_sequence(6, rng);
    SUBCASE("identical") {
        const auto r = pjpe(a, a);
        CHECK(r.mean == 0.0);
        CHECK(r.per_joint.size() == kNumKeypoints);
    }
    SUBCASE("3-4-5 offset") {
        auto b = a;
        for (Eigen::Index j = 0; j < b.coords.cols(); j += 2) {
            b.coords.col(j).array() += 0.03;
            b.coords.col(j + 1).array() += 0.04;
        }
        const auto r = pjpe(a, b);
        CHECK(r.mean == doctest::Approx(0.05).epsilon(1e-12));
        CHECK((r.per_joint.array() - 0.05).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("brute-force oracle and triangle inequality") {
        const auto b = random_sequence(6, rng);
        const auto c = random_sequence(6, rng);
        double total = 0.0;
        for (int j = 0; j < kNumKeypoints; ++j) {
            double joint = 0.0;
            for (int f = 0; f < 6; ++f) {
                const double dx = a.coords(f, 2 * j) - b.coords(f, 2 * j);
                const double dy = a.coords(f, 2 * j + 1) - b.coords(f, 2 * j + 1);
                joint += std::sqrt(dx * dx + dy * dy);
            }
            total += joint / 6.0;
        }
        CHECK(std::abs(pjpe(a, b).mean - total / kNumKeypoints) < 1e-9);
        CHECK(pjpe(a, c).mean <= pjpe(a, b).mean + pjpe(b, c).mean + 1e-9);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(pjpe(a, random_sequence(5, rng)), std::invalid_argument);
    }
}
