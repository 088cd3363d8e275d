#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vshift {

/// Dense row-major array of 64-bit reals.
///
/// The shape is a list of positive extents whose product equals the number of
/// stored elements. Inputs built from external data are rejected when they
/// contain NaN or infinities; internally produced values are screened with
/// all_finite() where the pipeline needs a validity gate.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    /// Takes ownership of data; validates extent product and finiteness.
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t axis) const;

    /// 2-D accessors; throw ShapeError unless rank() == 2.
    std::size_t rows() const;
    std::size_t cols() const;
    double& at(std::size_t row, std::size_t col);
    double at(std::size_t row, std::size_t col) const;
    std::span<double> row(std::size_t r);
    std::span<const double> row(std::size_t r) const;

    double& operator[](std::size_t i) { return data_[i]; }
    const double& operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool all_finite() const;

    /// Throws DomainError when any element is NaN or infinite.
    void require_finite(const char* context) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    bool operator==(const Tensor& other) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace vshift
