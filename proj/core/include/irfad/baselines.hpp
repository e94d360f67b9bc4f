#pragma once

#include "irfad/net.hpp"
#include "irfad/rng.hpp"
#include "irfad/schedule.hpp"
#include "irfad/tensor.hpp"

#include <cstddef>
#include <vector>

namespace irfad {

enum class BaselineKind { reconstruction, ddim_inversion };

struct BaselineResult {
    double score = 0.0;
    std::size_t nfe = 0;
    BaselineKind kind = BaselineKind::reconstruction;
};

/// Steps tau_1 < ... < tau_n = t_max with tau_k = floor(k t_max / n).
/// Requires 1 <= n <= t_max.
std::vector<int> uniform_subschedule(int t_max, int steps);

/// Multi-step reconstruction score.
///
/// x0 is noised to x_{t_start} in one jump, then denoised through the
/// sub-schedule tau_n = t_start, ..., tau_1, tau_0 = 0. With
/// r_k = ab(tau_k) / ab(tau_{k-1}) and b_k = 1 - r_k, each step is
///   x <- (x - b_k / sqrt(1 - ab(tau_k)) eps_theta(x, tau_k)) / sqrt(r_k)
///        + sqrt(b_k) z        (z omitted on the last step),
/// which is the ancestral DDPM step with sigma^2 = beta when the
/// sub-schedule is every step. Score = mean squared error between x0 and the
/// result; nfe = steps.
///
/// Randomness is drawn from `noise` in this order: d normals for the initial
/// jump, then d normals for each of the steps tau_n .. tau_2.
BaselineResult reconstruct_score(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                 int t_start, int steps, CounterRng noise);

/// Deterministic DDIM inversion through uniform_subschedule(T, steps):
///   e = eps_theta(x, tau_k)
///   x <- sqrt(ab(tau_k)) (x - sqrt(1 - ab(tau_{k-1})) e) / sqrt(ab(tau_{k-1}))
///        + sqrt(1 - ab(tau_k)) e
/// starting from x = x0 at tau_0 = 0. Score = 0.5 |x_T|^2; nfe = steps.
BaselineResult ddim_invert_score(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                 int steps);

/// Batched forms over rows of x0 ([n x d]). Row i of the reconstruction uses
/// noise_root.split(first_index + i), so results do not depend on batching.
std::vector<double> reconstruct_scores(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                       int t_start, int steps, const CounterRng& noise_root, std::size_t first_index,
                                       NfeCounter& nfe);
std::vector<double> ddim_invert_scores(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                       int steps, NfeCounter& nfe);

} // namespace irfad
