#include "irfad/tensor.hpp"

#include "irfad/errors.hpp"

#include <cmath>
#include <sstream>

namespace irfad {

std::size_t shape_size(const Tensor::Shape& shape) noexcept {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string shape_string(const Tensor::Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : m_shape(std::move(shape)), m_data(shape_size(m_shape), fill) {
    for (auto d : m_shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(m_shape));
    }
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : m_shape(std::move(shape)), m_data(std::move(data)) {
    for (auto d : m_shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(m_shape));
    }
    if (shape_size(m_shape) != m_data.size()) {
        throw ShapeError("shape " + shape_string(m_shape) + " does not match " +
                         std::to_string(m_data.size()) + " values");
    }
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= m_shape.size()) throw ShapeError("axis out of range for " + shape_string(m_shape));
    return m_shape[axis];
}

double Tensor::item() const {
    if (m_data.size() != 1) throw ShapeError("item() on tensor of shape " + shape_string(m_shape));
    return m_data[0];
}

Tensor Tensor::reshaped(Shape shape) const {
    return Tensor(std::move(shape), m_data);
}

bool Tensor::all_finite() const noexcept {
    for (double v : m_data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(what) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
    }
}

} // namespace irfad
