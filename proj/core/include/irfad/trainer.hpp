#pragma once

#include "irfad/data.hpp"
#include "irfad/net.hpp"
#include "irfad/schedule.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace irfad {

struct TrainConfig {
    int epochs = 200;
    std::size_t batch_size = 256;
    double learning_rate = 1e-3;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    std::string dataset_id;

    /// Throws ParameterError on out-of-range values.
    void validate() const;
};

struct TrainLog {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_seconds;

    double final_loss() const { return epoch_loss.empty() ? 0.0 : epoch_loss.back(); }
};

/// First and second moment estimates, one tensor per parameter.
struct AdamWState {
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::uint64_t step = 0;
};

/// One decoupled-weight-decay Adam update:
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
///   p = p (1 - lr wd) - lr * (m / (1 - b1^k)) / (sqrt(v / (1 - b2^k)) + eps)
/// An empty state is sized on first use.
void optimizer_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamWState& state,
                    const TrainConfig& cfg);

struct TrainResult {
    NoisePredictor net;
    TrainLog log;
};

using EpochCallback = std::function<void(int epoch, double mean_loss, double seconds)>;

/// Regresses eps_theta(x_t, t) onto eps. Each epoch visits a fresh
/// permutation of the data; sample slot k of epoch e draws t ~ U{1..T} and
/// eps ~ N(0, I) from its own substream (seed, e, k), so the random stream is
/// fixed per slot and the run is bitwise reproducible.
/// Throws TrainingDivergedError when a batch loss is not finite.
TrainResult train(NoisePredictor net, const Dataset& data, const NoiseSchedule& schedule, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

} // namespace irfad
