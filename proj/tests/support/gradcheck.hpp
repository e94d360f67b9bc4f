#pragma once

#include "irfad/grad.hpp"
#include "irfad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace irfad::testing {

/// Builds a scalar loss from leaves registered as parameters 0..n-1.
using LossBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheck {
    /// Largest |analytic - numeric| / max(1, |analytic|, |numeric|).
    double worst = 0.0;
    std::string where;
};

inline double evaluate_loss(const LossBuilder& build, const std::vector<Tensor>& inputs) {
    Tape tape;
    std::vector<Var> vars;
    for (std::size_t i = 0; i < inputs.size(); ++i) vars.push_back(tape.parameter(i, inputs[i]));
    return tape.value(build(tape, vars)).item();
}

/// Central differences with step h on every input coordinate.
inline GradCheck gradcheck(const LossBuilder& build, std::vector<Tensor> inputs, double h = 1e-5) {
    Tape tape;
    std::vector<Var> vars;
    for (std::size_t i = 0; i < inputs.size(); ++i) vars.push_back(tape.parameter(i, inputs[i]));
    const Gradients grads = tape.backward(build(tape, vars));

    GradCheck out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto it = grads.find(i);
        for (std::size_t j = 0; j < inputs[i].size(); ++j) {
            const double keep = inputs[i][j];
            inputs[i][j] = keep + h;
            const double up = evaluate_loss(build, inputs);
            inputs[i][j] = keep - h;
            const double down = evaluate_loss(build, inputs);
            inputs[i][j] = keep;
            const double numeric = (up - down) / (2 * h);
            const double analytic = it == grads.end() ? 0.0 : it->second[j];
            const double err =
                std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
            if (err > out.worst) {
                out.worst = err;
                out.where = "input " + std::to_string(i) + " entry " + std::to_string(j);
            }
        }
    }
    return out;
}

inline Tensor random_tensor(CounterRng& rng, Tensor::Shape shape, double lo = -2.0, double hi = 2.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = lo + (hi - lo) * rng.uniform();
    return t;
}

/// Weighted sum <v, w> so that a tensor-valued op gets a non-trivial scalar loss.
inline Var weighted_sum(Tape& tape, Var v, const Tensor& weights) {
    return tape.reduce_sum(tape.mul(v, tape.constant(weights)));
}

struct OpCase {
    std::string name;
    LossBuilder build;
    std::vector<Tensor> inputs;
};

/// One random small instance of the named op (dims 1..4).
inline OpCase random_op_case(const std::string& op, CounterRng& rng) {
    const auto dim = [&] { return static_cast<std::size_t>(1 + rng.below(4)); };
    const std::size_t n = dim(), k = dim(), m = dim();
    OpCase c{op, {}, {}};
    if (op == "add" || op == "sub" || op == "mul") {
        const Tensor w = random_tensor(rng, {n, k});
        c.inputs = {random_tensor(rng, {n, k}), random_tensor(rng, {n, k})};
        c.build = [op, w](Tape& t, const std::vector<Var>& v) {
            const Var r = op == "add" ? t.add(v[0], v[1]) : op == "sub" ? t.sub(v[0], v[1]) : t.mul(v[0], v[1]);
            return weighted_sum(t, r, w);
        };
    } else if (op == "matmul") {
        const Tensor w = random_tensor(rng, {n, m});
        c.inputs = {random_tensor(rng, {n, k}), random_tensor(rng, {k, m})};
        c.build = [w](Tape& t, const std::vector<Var>& v) { return weighted_sum(t, t.matmul(v[0], v[1]), w); };
    } else if (op == "scale") {
        const Tensor w = random_tensor(rng, {n, k});
        const double s = -3.0 + 6.0 * rng.uniform();
        c.inputs = {random_tensor(rng, {n, k})};
        c.build = [w, s](Tape& t, const std::vector<Var>& v) { return weighted_sum(t, t.scale(v[0], s), w); };
    } else if (op == "affine") {
        const Tensor w = random_tensor(rng, {n, m});
        c.inputs = {random_tensor(rng, {n, k}), random_tensor(rng, {k, m}), random_tensor(rng, {m})};
        c.build = [w](Tape& t, const std::vector<Var>& v) { return weighted_sum(t, t.affine(v[0], v[1], v[2]), w); };
    } else if (op == "silu") {
        const Tensor w = random_tensor(rng, {n, k});
        c.inputs = {random_tensor(rng, {n, k}, -4.0, 4.0)};
        c.build = [w](Tape& t, const std::vector<Var>& v) { return weighted_sum(t, t.silu(v[0]), w); };
    } else if (op == "reduce_sum") {
        c.inputs = {random_tensor(rng, {n, k})};
        c.build = [](Tape& t, const std::vector<Var>& v) { return t.reduce_sum(v[0]); };
    } else if (op == "mean_squared_error") {
        c.inputs = {random_tensor(rng, {n, k}), random_tensor(rng, {n, k})};
        c.build = [](Tape& t, const std::vector<Var>& v) { return t.mean_squared_error(v[0], v[1]); };
    } else if (op == "two_layer_net") {
        const std::size_t h = dim();
        const Tensor target = random_tensor(rng, {n, m});
        c.inputs = {random_tensor(rng, {n, k}), random_tensor(rng, {k, h}), random_tensor(rng, {h}),
                    random_tensor(rng, {h, m}), random_tensor(rng, {m})};
        c.build = [target](Tape& t, const std::vector<Var>& v) {
            const Var hidden = t.silu(t.affine(v[0], v[1], v[2]));
            return t.mean_squared_error(t.affine(hidden, v[3], v[4]), t.constant(target));
        };
    }
    return c;
}

inline const std::vector<std::string>& grad_ops() {
    static const std::vector<std::string> ops{"add",    "sub",        "mul",
                                              "matmul", "scale",      "affine",
                                              "silu",   "reduce_sum", "mean_squared_error",
                                              "two_layer_net"};
    return ops;
}

} // namespace irfad::testing
