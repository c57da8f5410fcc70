#include "skelgen/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace skelgen {

ScheduleKind parse_schedule_kind(const std::string& name) {
    if (name == "cosine") {
        return ScheduleKind::Cosine;
    }
    if (name == "linear") {
        return ScheduleKind::Linear;
    }
    throw std::invalid_argument("unknown noise schedule '" + name + "' (expected cosine or linear)");
}

std::string to_string(ScheduleKind kind) {
    return kind == ScheduleKind::Cosine ? "cosine" : "linear";
}

NoiseSchedule make_schedule(ScheduleKind kind, int steps, double beta_start, double beta_end) {
    if (steps < 2) {
        throw std::invalid_argument("noise schedule needs at least 2 steps");
    }
    NoiseSchedule s;
    s.kind = kind;
    s.beta.resize(steps);
    if (kind == ScheduleKind::Cosine) {
        constexpr double offset = 0.008;
        auto f = [&](double u) {
            const double c = std::cos((u + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
            return c * c;
        };
        for (int t = 0; t < steps; ++t) {
            const double a0 = f(static_cast<double>(t) / steps);
            const double a1 = f(static_cast<double>(t + 1) / steps);
            s.beta[t] = std::min(1.0 - a1 / a0, 0.999);
        }
    } else {
        if (!(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end)) {
            throw std::invalid_argument("linear schedule needs 0 < beta_start <= beta_end < 1");
        }
        for (int t = 0; t < steps; ++t) {
            s.beta[t] = beta_start + (beta_end - beta_start) * t / static_cast<double>(steps - 1);
        }
    }
    s.alpha_bar.resize(steps);
    s.posterior_var.resize(steps);
    double prod = 1.0;
    for (int t = 0; t < steps; ++t) {
        const double prev = prod;
        prod *= 1.0 - s.beta[t];
        s.alpha_bar[t] = prod;
        s.posterior_var[t] = s.beta[t] * (1.0 - prev) / (1.0 - prod);
    }
    return s;
}

bool satisfies_endpoint_bounds(const NoiseSchedule& sched) {
    for (int t = 0; t < sched.steps(); ++t) {
        if (!(sched.beta[t] > 0.0 && sched.beta[t] < 1.0)) {
            return false;
        }
        if (t > 0 && !(sched.alpha_bar[t] < sched.alpha_bar[t - 1])) {
            return false;
        }
    }
    return sched.alpha_bar.front() > 0.99 && sched.alpha_bar.back() < 0.01;
}

namespace {

void check_step(const NoiseSchedule& sched, int t) {
    if (t < 0 || t >= sched.steps()) {
        throw std::out_of_range("diffusion step " + std::to_string(t) + " outside [0, " +
                                std::to_string(sched.steps()) + ")");
    }
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
    }
}

}  // namespace

Matrix q_sample(const Matrix& x0, int t, const Matrix& eps, const NoiseSchedule& sched) {
    check_step(sched, t);
    check_same_shape(x0, eps, "q_sample");
    const double ab = sched.alpha_bar[t];
    return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * eps;
}

double x0_loss(const Matrix& x0, const Matrix& x0_hat) {
    check_same_shape(x0, x0_hat, "x0_loss");
    if (x0.size() == 0) {
        throw std::invalid_argument("x0_loss: empty input");
    }
    return (x0 - x0_hat).squaredNorm() / static_cast<double>(x0.size());
}

PosteriorCoefficients posterior_coefficients(const NoiseSchedule& sched, int t) {
    check_step(sched, t);
    const double ab = sched.alpha_bar[t];
    const double ab_prev = sched.alpha_bar_prev(t);
    const double beta = sched.beta[t];
    return {std::sqrt(ab_prev) * beta / (1.0 - ab), std::sqrt(1.0 - beta) * (1.0 - ab_prev) / (1.0 - ab)};
}

Matrix posterior_step(const Matrix& x_t, const Matrix& x0_hat, int t, const NoiseSchedule& sched,
                      const Matrix& noise) {
    check_step(sched, t);
    check_same_shape(x_t, x0_hat, "posterior_step");
    if (t == 0) {
        if (noise.size() != 0 && !noise.isZero(0.0)) {
            throw std::invalid_argument("posterior_step: noise must be zero at t = 0");
        }
        return x0_hat;
    }
    check_same_shape(x_t, noise, "posterior_step noise");
    const auto c = posterior_coefficients(sched, t);
    return c.x0 * x0_hat + c.xt * x_t + std::sqrt(sched.posterior_var[t]) * noise;
}

Matrix cfg_combine(const Matrix& uncond, const Matrix& cond, double alpha) {
    check_same_shape(uncond, cond, "cfg_combine");
    if (!std::isfinite(alpha)) {
        throw std::invalid_argument("cfg_combine: guidance scale must be finite");
    }
    return (1.0 - alpha) * uncond + alpha * cond;
}

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = normal(rng);
    }
    return m;
}

Matrix sample(const X0Predictor& predict, int frames, int dim, const NoiseSchedule& sched,
              const GuidanceConfig& guidance, std::uint64_t seed) {
    if (frames < 1 || dim < 1) {
        throw std::invalid_argument("sample: empty output shape");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&] {
        Matrix m(frames, dim);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            m.data()[i] = normal(rng);
        }
        return m;
    };

    Matrix x = draw();
    const Matrix zero = Matrix::Zero(frames, dim);
    for (int t = sched.steps() - 1; t >= 0; --t) {
        const Matrix cond = predict(x, t, false);
        const Matrix uncond = predict(x, t, true);
        if (cond.rows() != frames || cond.cols() != dim) {
            throw std::runtime_error("sample: denoiser returned a " + std::to_string(cond.rows()) + "x" +
                                     std::to_string(cond.cols()) + " prediction");
        }
        Matrix x0_hat = cfg_combine(uncond, cond, guidance.alpha);
        if (guidance.clip_x0) {
            x0_hat = x0_hat.cwiseMax(-guidance.clip_value).cwiseMin(guidance.clip_value);
        }
        x = posterior_step(x, x0_hat, t, sched, t > 0 ? draw() : zero);
    }
    return x;
}

}  // namespace skelgen
