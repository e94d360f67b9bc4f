#pragma once

#include "irfad/net.hpp"
#include "irfad/schedule.hpp"
#include "irfad/tensor.hpp"

#include <cstddef>

namespace irfad {

enum class InputKind { noisy_state, mean_path };

const char* to_string(InputKind kind) noexcept;

/// Inverse residual field of one sample: the predicted noise at step t.
struct IrfResult {
    Tensor delta;
    InputKind input_kind = InputKind::mean_path;
    int t = 0;
    std::size_t nfe = 0;
};

/// delta = eps_theta(x_t, t) with x_t = sqrt(ab_t) x0 + sqrt(1 - ab_t) eps.
/// One network evaluation; eps is supplied by the caller.
IrfResult irf_noisy(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t,
                    const Tensor& eps);

/// delta = eps_theta(sqrt(ab_t) x0, t). One network evaluation, deterministic.
IrfResult irf_mean(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t);

/// Batched forms over rows of x0 ([n x d]); each row costs one evaluation,
/// added to nfe. Rows are bitwise equal to the single-sample results.
Tensor irf_mean_batch(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t,
                      NfeCounter& nfe);
Tensor irf_noisy_batch(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t,
                       const Tensor& eps, NfeCounter& nfe);

} // namespace irfad
