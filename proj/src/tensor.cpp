#include "vshift/tensor.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vshift/errors.hpp"

namespace vshift {

namespace {

std::size_t checked_extent_product(const std::vector<std::size_t>& shape) {
    std::size_t product = 1;
    for (std::size_t extent : shape) {
        if (extent == 0) throw ShapeError("tensor extents must be positive");
        if (extent > std::numeric_limits<std::size_t>::max() / product)
            throw ShapeError("tensor extent product overflows");
        product *= extent;
    }
    return product;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_extent_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_extent_product(shape_) != data_.size())
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape product");
    require_finite("tensor construction");
}

std::size_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size()) throw ShapeError("tensor axis out of range");
    return shape_[axis];
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows() requires a rank-2 tensor");
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols() requires a rank-2 tensor");
    return shape_[1];
}

double& Tensor::at(std::size_t row, std::size_t col) {
    return data_[row * cols() + col];
}

double Tensor::at(std::size_t row, std::size_t col) const {
    return data_[row * cols() + col];
}

std::span<double> Tensor::row(std::size_t r) {
    const std::size_t c = cols();
    return std::span<double>(data_.data() + r * c, c);
}

std::span<const double> Tensor::row(std::size_t r) const {
    const std::size_t c = cols();
    return std::span<const double>(data_.data() + r * c, c);
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void Tensor::require_finite(const char* context) const {
    if (!all_finite()) throw DomainError(std::string(context) + ": non-finite element");
}

}  // namespace vshift
