#include "irfad/grad.hpp"

#include "irfad/errors.hpp"
#include "kernels.hpp"

#include <cmath>

namespace irfad {

namespace {

void require_matrix(const Tensor& t, const char* what) {
    if (t.rank() != 2) throw ShapeError(std::string(what) + ": expected a matrix, got " + shape_string(t.shape()));
}

} // namespace

Var Tape::push(Node node) {
    m_nodes.push_back(std::move(node));
    return Var{m_nodes.size() - 1};
}

Var Tape::constant(Tensor value) {
    if (!value.all_finite()) throw NumericError("non-finite value entering the tape");
    Node n;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::parameter(std::size_t param_id, Tensor value) {
    if (!value.all_finite()) {
        throw NumericError("non-finite parameter " + std::to_string(param_id) + " entering the tape");
    }
    Node n;
    n.value = std::move(value);
    n.param_id = param_id;
    return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
    const Tensor& x = node(a).value;
    const Tensor& y = node(b).value;
    require_same_shape(x, y, "add");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return push(Node{Op::add, {a.id, b.id, 0}, 2, std::move(out), 0.0, std::nullopt});
}

Var Tape::sub(Var a, Var b) {
    const Tensor& x = node(a).value;
    const Tensor& y = node(b).value;
    require_same_shape(x, y, "sub");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return push(Node{Op::sub, {a.id, b.id, 0}, 2, std::move(out), 0.0, std::nullopt});
}

Var Tape::mul(Var a, Var b) {
    const Tensor& x = node(a).value;
    const Tensor& y = node(b).value;
    require_same_shape(x, y, "mul");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    return push(Node{Op::mul, {a.id, b.id, 0}, 2, std::move(out), 0.0, std::nullopt});
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& x = node(a).value;
    const Tensor& y = node(b).value;
    require_matrix(x, "matmul");
    require_matrix(y, "matmul");
    if (x.dim(1) != y.dim(0)) {
        throw ShapeError("matmul: inner dimensions differ " + shape_string(x.shape()) + " * " +
                         shape_string(y.shape()));
    }
    const std::size_t n = x.dim(0), k = x.dim(1), m = y.dim(1);
    Tensor out({n, m});
    kernels::matmul(x.data().data(), y.data().data(), out.data().data(), n, k, m);
    return push(Node{Op::matmul, {a.id, b.id, 0}, 2, std::move(out), 0.0, std::nullopt});
}

Var Tape::scale(Var a, double c) {
    const Tensor& x = node(a).value;
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
    return push(Node{Op::scale, {a.id, 0, 0}, 1, std::move(out), c, std::nullopt});
}

Var Tape::affine(Var x, Var w, Var b) {
    const Tensor& xv = node(x).value;
    const Tensor& wv = node(w).value;
    const Tensor& bv = node(b).value;
    require_matrix(xv, "affine");
    require_matrix(wv, "affine");
    if (xv.dim(1) != wv.dim(0)) {
        throw ShapeError("affine: input " + shape_string(xv.shape()) + " does not fit weights " +
                         shape_string(wv.shape()));
    }
    if (bv.rank() != 1 || bv.dim(0) != wv.dim(1)) {
        throw ShapeError("affine: bias " + shape_string(bv.shape()) + " does not fit weights " +
                         shape_string(wv.shape()));
    }
    const std::size_t n = xv.dim(0), k = xv.dim(1), m = wv.dim(1);
    Tensor out({n, m});
    kernels::matmul(xv.data().data(), wv.data().data(), out.data().data(), n, k, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) out[i * m + j] += bv[j];
    }
    return push(Node{Op::affine, {x.id, w.id, b.id}, 3, std::move(out), 0.0, std::nullopt});
}

Var Tape::silu(Var a) {
    const Tensor& x = node(a).value;
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = kernels::silu(x[i]);
    return push(Node{Op::silu, {a.id, 0, 0}, 1, std::move(out), 0.0, std::nullopt});
}

Var Tape::reduce_sum(Var a) {
    const Tensor& x = node(a).value;
    double s = 0.0;
    for (double v : x.data()) s += v;
    return push(Node{Op::reduce_sum, {a.id, 0, 0}, 1, Tensor::scalar(s), 0.0, std::nullopt});
}

Var Tape::mean_squared_error(Var a, Var b) {
    const Tensor& x = node(a).value;
    const Tensor& y = node(b).value;
    require_same_shape(x, y, "mean_squared_error");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    const double mean = s / static_cast<double>(x.size());
    return push(Node{Op::mse, {a.id, b.id, 0}, 2, Tensor::scalar(mean), 0.0, std::nullopt});
}

Gradients Tape::backward(Var loss) const {
    const Node& root = node(loss);
    if (root.value.size() != 1) {
        throw ContractError("backward needs a scalar root, got shape " + shape_string(root.value.shape()));
    }
    if (!root.value.all_finite()) throw NumericError("loss is not finite");

    std::vector<Tensor> adj(loss.id + 1);
    adj[loss.id] = Tensor(root.value.shape(), 1.0);

    // Adjoint buffers are allocated on first use; adj is never resized, so the
    // returned references stay valid.
    auto grad_of = [&](std::size_t id) -> Tensor& {
        if (adj[id].size() == 0) adj[id] = Tensor(m_nodes[id].value.shape(), 0.0);
        return adj[id];
    };

    Gradients grads;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
        if (adj[id].size() == 0) continue;
        const Node& n = m_nodes[id];
        const Tensor& g = adj[id];
        switch (n.op) {
        case Op::leaf:
            if (n.param_id) {
                auto [it, inserted] = grads.try_emplace(*n.param_id, g);
                if (!inserted) {
                    for (std::size_t i = 0; i < g.size(); ++i) it->second[i] += g[i];
                }
            }
            break;
        case Op::add: {
            Tensor& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            Tensor& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
            break;
        }
        case Op::sub: {
            Tensor& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            Tensor& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
            break;
        }
        case Op::mul: {
            const Tensor& x = m_nodes[n.inputs[0]].value;
            const Tensor& y = m_nodes[n.inputs[1]].value;
            Tensor& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
            Tensor& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
            break;
        }
        case Op::matmul:
        case Op::affine: {
            const Tensor& x = m_nodes[n.inputs[0]].value;
            const Tensor& w = m_nodes[n.inputs[1]].value;
            const std::size_t rows = x.dim(0), k = x.dim(1), m = w.dim(1);
            Tensor& gx = grad_of(n.inputs[0]);
            kernels::matmul_grad_a(g.data().data(), w.data().data(), gx.data().data(), rows, k, m);
            Tensor& gw = grad_of(n.inputs[1]);
            kernels::matmul_grad_b(x.data().data(), g.data().data(), gw.data().data(), rows, k, m);
            if (n.op == Op::affine) {
                Tensor& gb = grad_of(n.inputs[2]);
                for (std::size_t i = 0; i < rows; ++i) {
                    for (std::size_t j = 0; j < m; ++j) gb[j] += g[i * m + j];
                }
            }
            break;
        }
        case Op::scale: {
            Tensor& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.constant * g[i];
            break;
        }
        case Op::silu: {
            const Tensor& x = m_nodes[n.inputs[0]].value;
            Tensor& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * kernels::silu_grad(x[i]);
            break;
        }
        case Op::reduce_sum: {
            Tensor& ga = grad_of(n.inputs[0]);
            const double s = g[0];
            for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s;
            break;
        }
        case Op::mse: {
            const Tensor& x = m_nodes[n.inputs[0]].value;
            const Tensor& y = m_nodes[n.inputs[1]].value;
            const double c = 2.0 * g[0] / static_cast<double>(x.size());
            Tensor& ga = grad_of(n.inputs[0]);
            for (std::size_t i = 0; i < x.size(); ++i) ga[i] += c * (x[i] - y[i]);
            Tensor& gb = grad_of(n.inputs[1]);
            for (std::size_t i = 0; i < x.size(); ++i) gb[i] -= c * (x[i] - y[i]);
            break;
        }
        }
    }
    return grads;
}

} // namespace irfad
