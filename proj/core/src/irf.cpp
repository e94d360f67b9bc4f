#include "irfad/irf.hpp"

#include "irfad/errors.hpp"

namespace irfad {

const char* to_string(InputKind kind) noexcept {
    return kind == InputKind::noisy_state ? "noisy_state" : "mean_path";
}

namespace {

void check_x0(const NoisePredictor& net, const Tensor& x0) {
    if (x0.size() != net.input_dim()) {
        throw ShapeError("irf: sample has " + std::to_string(x0.size()) + " values, net expects " +
                         std::to_string(net.input_dim()));
    }
}

} // namespace

IrfResult irf_noisy(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t,
                    const Tensor& eps) {
    check_x0(net, x0);
    NfeCounter nfe;
    Tensor delta = net.predict_noise(q_sample(schedule, x0, t, eps), t, nfe);
    return IrfResult{std::move(delta), InputKind::noisy_state, t, nfe.count()};
}

IrfResult irf_mean(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t) {
    check_x0(net, x0);
    NfeCounter nfe;
    Tensor delta = net.predict_noise(mean_path(schedule, x0, t), t, nfe);
    return IrfResult{std::move(delta), InputKind::mean_path, t, nfe.count()};
}

Tensor irf_mean_batch(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t,
                      NfeCounter& nfe) {
    const int steps[1] = {t};
    return net.predict_batch(mean_path(schedule, x0, t), steps, nfe);
}

Tensor irf_noisy_batch(const NoisePredictor& net, const NoiseSchedule& schedule, const Tensor& x0, int t,
                       const Tensor& eps, NfeCounter& nfe) {
    const int steps[1] = {t};
    return net.predict_batch(q_sample(schedule, x0, t, eps), steps, nfe);
}

} // namespace irfad
