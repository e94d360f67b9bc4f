#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace irfad {

/// Dense row-major array of doubles. Carries feature maps (c, h, w), batches
/// (n, d), weight matrices and scalars (shape {}).
class Tensor {
public:
    using Shape = std::vector<std::size_t>;

    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }

    const Shape& shape() const noexcept { return m_shape; }
    std::size_t rank() const noexcept { return m_shape.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t size() const noexcept { return m_data.size(); }

    std::span<double> data() noexcept { return m_data; }
    std::span<const double> data() const noexcept { return m_data; }
    const std::vector<double>& values() const noexcept { return m_data; }

    double& operator[](std::size_t i) noexcept { return m_data[i]; }
    double operator[](std::size_t i) const noexcept { return m_data[i]; }

    double& at(std::size_t row, std::size_t col) noexcept { return m_data[row * m_shape[1] + col]; }
    double at(std::size_t row, std::size_t col) const noexcept { return m_data[row * m_shape[1] + col]; }

    /// Value of a rank-0 or single-element tensor.
    double item() const;

    /// Same data under a new shape with equal element count.
    Tensor reshaped(Shape shape) const;

    bool all_finite() const noexcept;

    bool operator==(const Tensor& other) const = default;

private:
    Shape m_shape;
    std::vector<double> m_data;
};

std::size_t shape_size(const Tensor::Shape& shape) noexcept;
std::string shape_string(const Tensor::Shape& shape);

/// Throws ShapeError when the two shapes differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

} // namespace irfad
