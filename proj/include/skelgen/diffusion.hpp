#pragma once

#include "skelgen/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace skelgen {

enum class ScheduleKind { Cosine, Linear };

ScheduleKind parse_schedule_kind(const std::string& name);
std::string to_string(ScheduleKind kind);

// T-step DDPM coefficient table, indexed by t in [0, T).
struct NoiseSchedule {
    ScheduleKind kind = ScheduleKind::Cosine;
    std::vector<double> beta;
    std::vector<double> alpha_bar;      // prod_{s <= t} (1 - beta_s)
    std::vector<double> posterior_var;  // beta_t (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t)

    int steps() const { return static_cast<int>(beta.size()); }
    double alpha_bar_prev(int t) const { return t == 0 ? 1.0 : alpha_bar[t - 1]; }
};

// Cosine follows the improved-DDPM construction (offset 0.008, beta capped at
// 0.999). Linear spaces beta evenly between beta_start and beta_end.
NoiseSchedule make_schedule(ScheduleKind kind, int steps, double beta_start = 1e-4, double beta_end = 0.02);

// Monotonicity plus the endpoint bounds alpha_bar[0] > 0.99, alpha_bar[T-1] < 0.01.
bool satisfies_endpoint_bounds(const NoiseSchedule& sched);

Matrix q_sample(const Matrix& x0, int t, const Matrix& eps, const NoiseSchedule& sched);

// Mean squared error over every entry.
double x0_loss(const Matrix& x0, const Matrix& x0_hat);

// One ancestral step of the x0-parametrized posterior q(x_{t-1} | x_t, x0_hat).
// At t = 0 the prediction itself is returned and noise must be zero.
Matrix posterior_step(const Matrix& x_t, const Matrix& x0_hat, int t, const NoiseSchedule& sched,
                      const Matrix& noise);

struct PosteriorCoefficients {
    double x0 = 0.0;
    double xt = 0.0;
};
PosteriorCoefficients posterior_coefficients(const NoiseSchedule& sched, int t);

// uncond + alpha (cond - uncond), written as (1 - alpha) uncond + alpha cond so
// that alpha = 0 and alpha = 1 reproduce the branches bit for bit.
Matrix cfg_combine(const Matrix& uncond, const Matrix& cond, double alpha);

struct GuidanceConfig {
    double alpha = 2.5;
    // Optional clamp of the guided x0 prediction to +-clip_value (normalized units).
    bool clip_x0 = false;
    double clip_value = 4.0;
};

// Model evaluation callback: (x_t, t, unconditional) -> x0 prediction.
// Reference skeleton and audio are bound by the caller.
using X0Predictor = std::function<Matrix(const Matrix& x_t, int t, bool unconditional)>;

// Reverse diffusion from seeded Gaussian noise with classifier-free guidance.
Matrix sample(const X0Predictor& predict, int frames, int dim, const NoiseSchedule& sched,
              const GuidanceConfig& guidance, std::uint64_t seed);

// Standard-normal matrix from a seeded generator.
Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed);

}  // namespace skelgen
