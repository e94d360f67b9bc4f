#include "irfad/baselines.hpp"

#include "irfad/errors.hpp"

#include <cmath>
#include <string>

namespace irfad {

std::vector<int> uniform_subschedule(int t_max, int steps) {
    if (steps < 1 || steps > t_max) {
        throw ParameterError("step budget " + std::to_string(steps) + " must lie in [1, " + std::to_string(t_max) + "]");
    }
    std::vector<int> taus(static_cast<std::size_t>(steps));
    for (int k = 1; k <= steps; ++k) {
        taus[static_cast<std::size_t>(k - 1)] =
            static_cast<int>((static_cast<long long>(k) * t_max) / steps);
    }
    return taus;
}

namespace {

// Shared by the single and batched forms; rngs[i] feeds row i.
std::vector<double> reconstruct_rows(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                     int t_start, int steps, std::vector<CounterRng>& rngs, NfeCounter& nfe) {
    schedule.check_step(t_start);
    const std::vector<int> taus = uniform_subschedule(t_start, steps);
    if (x0.rank() != 2 || x0.dim(1) != net.input_dim()) throw ShapeError("reconstruction expects [n x d] input");
    const std::size_t n = x0.dim(0), d = x0.dim(1);

    const double ab_start = schedule.alpha_bar(t_start);
    Tensor x({n, d});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x[i * d + j] = std::sqrt(ab_start) * x0[i * d + j] + std::sqrt(1.0 - ab_start) * rngs[i].normal();
        }
    }

    for (int k = steps; k >= 1; --k) {
        const int tau = taus[static_cast<std::size_t>(k - 1)];
        const int tau_prev = k > 1 ? taus[static_cast<std::size_t>(k - 2)] : 0;
        const double ab = schedule.alpha_bar(tau);
        const double ratio = ab / schedule.alpha_bar(tau_prev);
        const double beta = 1.0 - ratio;
        const double eps_coef = beta / std::sqrt(1.0 - ab);
        const double root = std::sqrt(ratio);
        const int step_arr[1] = {tau};
        const Tensor eps = net.predict_batch(x, step_arr, nfe);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                double v = (x[i * d + j] - eps_coef * eps[i * d + j]) / root;
                if (k > 1) v += std::sqrt(beta) * rngs[i].normal();
                x[i * d + j] = v;
            }
        }
    }

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x0[i * d + j] - x[i * d + j];
            s += diff * diff;
        }
        scores[i] = s / static_cast<double>(d);
    }
    return scores;
}

} // namespace

std::vector<double> reconstruct_scores(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                       int t_start, int steps, const CounterRng& noise_root, std::size_t first_index,
                                       NfeCounter& nfe) {
    const std::size_t n = x0.rank() == 2 ? x0.dim(0) : 0;
    std::vector<CounterRng> rngs;
    rngs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rngs.push_back(noise_root.split(first_index + i));
    return reconstruct_rows(net, schedule, x0, t_start, steps, rngs, nfe);
}

BaselineResult reconstruct_score(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                 int t_start, int steps, CounterRng noise) {
    if (x0.size() != net.input_dim()) throw ShapeError("reconstruction: sample size does not match the net");
    NfeCounter nfe;
    std::vector<CounterRng> rngs{noise};
    const auto scores = reconstruct_rows(net, schedule, x0.reshaped({1, x0.size()}), t_start, steps, rngs, nfe);
    return BaselineResult{scores[0], nfe.count(), BaselineKind::reconstruction};
}

std::vector<double> ddim_invert_scores(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                       int steps, NfeCounter& nfe) {
    const std::vector<int> taus = uniform_subschedule(schedule.steps(), steps);
    if (x0.rank() != 2 || x0.dim(1) != net.input_dim()) throw ShapeError("inversion expects [n x d] input");
    const std::size_t n = x0.dim(0), d = x0.dim(1);
    Tensor x = x0;
    int tau_prev = 0;
    for (int tau : taus) {
        const double ab_prev = schedule.alpha_bar(tau_prev);
        const double ab = schedule.alpha_bar(tau);
        const int step_arr[1] = {tau};
        const Tensor eps = net.predict_batch(x, step_arr, nfe);
        for (std::size_t i = 0; i < n * d; ++i) {
            const double x0_hat = (x[i] - std::sqrt(1.0 - ab_prev) * eps[i]) / std::sqrt(ab_prev);
            x[i] = std::sqrt(ab) * x0_hat + std::sqrt(1.0 - ab) * eps[i];
        }
        tau_prev = tau;
    }
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += x[i * d + j] * x[i * d + j];
        scores[i] = 0.5 * s;
    }
    return scores;
}

BaselineResult ddim_invert_score(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0,
                                 int steps) {
    if (x0.size() != net.input_dim()) throw ShapeError("inversion: sample size does not match the net");
    NfeCounter nfe;
    const auto scores = ddim_invert_scores(net, schedule, x0.reshaped({1, x0.size()}), steps, nfe);
    return BaselineResult{scores[0], nfe.count(), BaselineKind::ddim_inversion};
}

} // namespace irfad
