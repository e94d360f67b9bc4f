#pragma once

#include "irfad/tensor.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace irfad {

/// Handle to a node on a Tape.
struct Var {
    std::size_t id = 0;
};

/// Gradient of the loss for every parameter leaf, keyed by parameter id.
using Gradients = std::map<std::size_t, Tensor>;

/// Single-owner record of a forward computation, built fresh for every
/// training step. Nodes are appended in evaluation order, so the node vector
/// is already a topological order and backward() is one reverse sweep.
class Tape {
public:
    /// Leaf without a gradient. Rejects non-finite values.
    Var constant(Tensor value);
    /// Leaf whose gradient is reported under param_id. Rejects non-finite values.
    Var parameter(std::size_t param_id, Tensor value);

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    /// [n x k] * [k x m]
    Var matmul(Var a, Var b);
    Var scale(Var a, double c);
    /// x[n x k] * w[k x m] + b[m], the bias broadcast over rows.
    Var affine(Var x, Var w, Var b);
    /// Sigmoid-weighted linear unit x * sigmoid(x).
    Var silu(Var a);
    Var reduce_sum(Var a);
    /// Mean over all entries of (a - b)^2, as a scalar.
    Var mean_squared_error(Var a, Var b);

    const Tensor& value(Var v) const { return m_nodes.at(v.id).value; }
    std::size_t size() const noexcept { return m_nodes.size(); }

    /// Reverse sweep from a scalar root. Throws ContractError when the root is
    /// not a single value and NumericError when it is not finite.
    Gradients backward(Var loss) const;

private:
    enum class Op { leaf, add, sub, mul, matmul, scale, affine, silu, reduce_sum, mse };

    struct Node {
        Op op = Op::leaf;
        std::array<std::size_t, 3> inputs{};
        std::size_t arity = 0;
        Tensor value;
        double constant = 0.0;
        std::optional<std::size_t> param_id;
    };

    Var push(Node node);
    const Node& node(Var v) const { return m_nodes.at(v.id); }

    std::vector<Node> m_nodes;
};

} // namespace irfad
