#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "vshift/layers.hpp"

namespace vshift {

/// An ordered stack of layers. Exclusively owned during forward/backward
/// because layer caches mutate.
class Network {
public:
    Network() = default;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;

    void append(std::unique_ptr<Layer> layer);

    Tensor forward(const Tensor& x, LayerMode mode, RngStream& rng);
    /// Propagates through the stack in reverse; requires a preceding forward.
    Tensor backward(const Tensor& grad_out);

    std::size_t layer_count() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_.at(i); }
    const Layer& layer(std::size_t i) const { return *layers_.at(i); }

    /// Learnable parameters in topological order; excludes moving statistics.
    std::vector<ParamRef> parameters();

    /// Normalization layers in topological order, shallow to deep.
    std::vector<BatchNormLayer*> batchnorm_layers();
    std::vector<const BatchNormLayer*> batchnorm_layers() const;

    /// Order-sensitive FNV-1a hash over the bytes of every learnable
    /// parameter; moving statistics excluded. Bit-exact comparisons only.
    std::uint64_t parameter_checksum() const;

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace vshift
