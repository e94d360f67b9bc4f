#pragma once

#include "irfad/tensor.hpp"

#include <vector>

namespace irfad {

/// Parameters that identify a linear schedule. They travel with checkpoints
/// and run configs.
struct ScheduleParams {
    int steps = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;

    bool operator==(const ScheduleParams&) const = default;
};

/// Per-step noise levels beta_t and their running products
/// alpha_bar_t = prod_{s<=t} (1 - beta_s). Steps are 1-indexed; t = 0 is clean
/// data, with alpha_bar_0 = 1. Immutable after construction.
class NoiseSchedule {
public:
    /// Betas interpolated linearly from beta_start (t = 1) to beta_end (t = T).
    static NoiseSchedule linear(int steps, double beta_start, double beta_end);
    static NoiseSchedule linear(const ScheduleParams& p) { return linear(p.steps, p.beta_start, p.beta_end); }

    /// Arbitrary betas in [0, 1). Intended for tests: beta = 0 is accepted so
    /// alpha_bar = 1 cases can be built directly.
    static NoiseSchedule from_betas(std::vector<double> betas);

    int steps() const noexcept { return static_cast<int>(m_betas.size()); }
    double beta(int t) const;
    double alpha_bar(int t) const;
    const ScheduleParams& params() const noexcept { return m_params; }

    /// Throws ParameterError unless 1 <= t <= T.
    void check_step(int t) const;

private:
    NoiseSchedule(std::vector<double> betas, ScheduleParams params);

    std::vector<double> m_betas;      // index t-1
    std::vector<double> m_alpha_bars; // index t, with [0] = 1
    ScheduleParams m_params;
};

/// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps.
Tensor q_sample(const NoiseSchedule& schedule, const Tensor& x0, int t, const Tensor& eps);

/// Noiseless forward mean sqrt(alpha_bar_t) x0.
Tensor mean_path(const NoiseSchedule& schedule, const Tensor& x0, int t);

} // namespace irfad
