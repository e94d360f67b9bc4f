#include "irfad/trainer.hpp"

#include "irfad/errors.hpp"
#include "irfad/grad.hpp"
#include "irfad/rng.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace irfad {

void TrainConfig::validate() const {
    if (epochs < 1) throw ParameterError("epochs must be >= 1");
    if (batch_size < 1) throw ParameterError("batch size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ParameterError("learning rate must be finite and non-negative");
    }
    if (!(weight_decay >= 0.0)) throw ParameterError("weight decay must be non-negative");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ParameterError("moment decay rates must lie in (0, 1)");
    }
    if (!(epsilon > 0.0)) throw ParameterError("optimizer epsilon must be positive");
}

void optimizer_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamWState& state,
                    const TrainConfig& cfg) {
    if (params.size() != grads.size()) throw ShapeError("optimizer: parameter/gradient count mismatch");
    if (state.first_moment.empty()) {
        for (const auto& p : params) {
            state.first_moment.emplace_back(p.shape(), 0.0);
            state.second_moment.emplace_back(p.shape(), 0.0);
        }
    }
    if (state.first_moment.size() != params.size()) throw ShapeError("optimizer: state does not match parameters");
    for (std::size_t i = 0; i < params.size(); ++i) {
        require_same_shape(params[i], grads[i], "optimizer gradient");
        require_same_shape(params[i], state.first_moment[i], "optimizer state");
    }

    ++state.step;
    const double k = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(cfg.beta1, k);
    const double correction2 = 1.0 - std::pow(cfg.beta2, k);
    const double lr = cfg.learning_rate;
    const double decay = 1.0 - lr * cfg.weight_decay;

    for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params[i].data();
        auto g = grads[i].data();
        auto m = state.first_moment[i].data();
        auto v = state.second_moment[i].data();
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            p[j] = p[j] * decay - lr * (m_hat / (std::sqrt(v_hat) + cfg.epsilon));
        }
    }
}

TrainResult train(NoisePredictor net, const Dataset& data, const NoiseSchedule& schedule, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
    cfg.validate();
    if (data.size() == 0) throw DataError("training set is empty");
    if (data.sample_dim() != net.input_dim()) {
        throw ShapeError("net input dim " + std::to_string(net.input_dim()) + " does not match data dim " +
                         std::to_string(data.sample_dim()));
    }
    if (schedule.params().steps != net.schedule().steps) {
        throw ParameterError("net was built for a different number of diffusion steps");
    }

    const std::size_t n = data.size();
    const std::size_t d = data.sample_dim();
    const auto T = static_cast<std::uint64_t>(schedule.steps());
    const CounterRng root(cfg.seed);
    const CounterRng shuffle_root = root.split(0);
    const CounterRng sample_root = root.split(1);

    AdamWState state;
    TrainLog log;
    std::vector<std::size_t> order(n);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        CounterRng shuffle = shuffle_root.split(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

        const CounterRng epoch_root = sample_root.split(static_cast<std::uint64_t>(epoch));
        double loss_sum = 0.0;
        for (std::size_t first = 0; first < n; first += cfg.batch_size) {
            const std::size_t b = std::min(cfg.batch_size, n - first);
            Tensor x_t({b, d});
            Tensor eps({b, d});
            std::vector<int> steps(b);
            for (std::size_t r = 0; r < b; ++r) {
                CounterRng rng = epoch_root.split(first + r);
                const int t = static_cast<int>(1 + rng.below(T));
                const double ab = schedule.alpha_bar(t);
                const double a = std::sqrt(ab), s = std::sqrt(1.0 - ab);
                const auto x0 = data.sample(order[first + r]);
                steps[r] = t;
                for (std::size_t j = 0; j < d; ++j) {
                    const double e = rng.normal();
                    eps[r * d + j] = e;
                    x_t[r * d + j] = a * x0[j] + s * e;
                }
            }

            Tape tape;
            Var pred = net.forward(tape, x_t, steps);
            Var target = tape.constant(std::move(eps));
            Var loss = tape.mean_squared_error(pred, target);
            const double value = tape.value(loss).item();
            if (!std::isfinite(value)) {
                throw TrainingDivergedError(epoch, "training diverged in epoch " + std::to_string(epoch) +
                                                       " (loss is not finite)");
            }
            const Gradients grads = tape.backward(loss);
            std::vector<Tensor> ordered;
            ordered.reserve(net.parameters().size());
            for (std::size_t i = 0; i < net.parameters().size(); ++i) ordered.push_back(grads.at(i));
            optimizer_step(net.mutable_parameters(), ordered, state, cfg);
            loss_sum += value * static_cast<double>(b);
        }
        for (const auto& p : net.parameters()) {
            if (!p.all_finite()) {
                throw TrainingDivergedError(epoch, "training diverged in epoch " + std::to_string(epoch) +
                                                       " (parameters are not finite)");
            }
        }
        const double mean_loss = loss_sum / static_cast<double>(n);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        log.epoch_loss.push_back(mean_loss);
        log.epoch_seconds.push_back(seconds);
        if (on_epoch) on_epoch(epoch, mean_loss, seconds);
    }
    return TrainResult{std::move(net), std::move(log)};
}

} // namespace irfad
