#include "irfad/schedule.hpp"

#include "irfad/errors.hpp"

#include <cmath>
#include <string>

namespace irfad {

NoiseSchedule::NoiseSchedule(std::vector<double> betas, ScheduleParams params)
    : m_betas(std::move(betas)), m_params(params) {
    m_alpha_bars.resize(m_betas.size() + 1);
    m_alpha_bars[0] = 1.0;
    for (std::size_t t = 1; t <= m_betas.size(); ++t) {
        m_alpha_bars[t] = m_alpha_bars[t - 1] * (1.0 - m_betas[t - 1]);
    }
}

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
    if (steps < 1) throw ParameterError("schedule needs T >= 1, got " + std::to_string(steps));
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw ParameterError("schedule needs 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> betas(static_cast<std::size_t>(steps));
    for (int t = 1; t <= steps; ++t) {
        if (steps == 1 || t == 1) {
            betas[t - 1] = beta_start;
        } else if (t == steps) {
            betas[t - 1] = beta_end;
        } else {
            const double f = static_cast<double>(t - 1) / static_cast<double>(steps - 1);
            betas[t - 1] = beta_start + f * (beta_end - beta_start);
        }
    }
    return NoiseSchedule(std::move(betas), ScheduleParams{steps, beta_start, beta_end});
}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
    if (betas.empty()) throw ParameterError("schedule needs at least one beta");
    for (double b : betas) {
        if (!(b >= 0.0 && b < 1.0)) throw ParameterError("betas must lie in [0, 1)");
    }
    ScheduleParams p{static_cast<int>(betas.size()), betas.front(), betas.back()};
    return NoiseSchedule(std::move(betas), p);
}

void NoiseSchedule::check_step(int t) const {
    if (t < 1 || t > steps()) {
        throw ParameterError("step " + std::to_string(t) + " outside [1, " + std::to_string(steps()) + "]");
    }
}

double NoiseSchedule::beta(int t) const {
    check_step(t);
    return m_betas[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar(int t) const {
    if (t == 0) return 1.0;
    check_step(t);
    return m_alpha_bars[static_cast<std::size_t>(t)];
}

Tensor q_sample(const NoiseSchedule& schedule, const Tensor& x0, int t, const Tensor& eps) {
    require_same_shape(x0, eps, "q_sample");
    const double ab = schedule.alpha_bar(t);
    const double a = std::sqrt(ab);
    const double b = std::sqrt(1.0 - ab);
    Tensor out(x0.shape());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + b * eps[i];
    return out;
}

Tensor mean_path(const NoiseSchedule& schedule, const Tensor& x0, int t) {
    const double a = std::sqrt(schedule.alpha_bar(t));
    Tensor out(x0.shape());
    // "+ 0.0" maps -0 to +0 exactly as q_sample does with eps = 0, so the two
    // agree bitwise on the noiseless path.
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + 0.0;
    return out;
}

} // namespace irfad
