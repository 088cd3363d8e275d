#pragma once

#include <cstdint>
#include <vector>

#include "vshift/network.hpp"

namespace vshift {

/// Where the stochastic layer sits relative to normalization:
///  - DropA: dropout feeds a normalization layer directly.
///  - DropB: dropout feeds the block's dense layer, whose output is normalized.
///  - LastLayer: a single dropout after every normalization layer, right
///    before the classifier.
///  - UoutB: multiplicative uniform noise in the DropB position.
enum class Placement { None, DropA, DropB, LastLayer, UoutB };

struct ArchSpec {
    std::size_t input_dim = 16;
    std::vector<std::size_t> hidden_widths = {32};  // one entry, or one per block
    std::size_t num_blocks = 3;
    std::size_t num_classes = 3;
    Placement placement = Placement::None;
    double drop_ratio = 0.0;  // user-facing drop probability, retain = 1 - drop
    double beta = 0.0;
    bool bn_affine = false;
    double bn_momentum = 0.1;

    void validate() const;
    std::size_t width_of_block(std::size_t block) const;
};

/// Builds the block stack Dense -> BN -> ReLU with the placement-specific
/// stochastic layer inserted, then a dense classifier. Weights are drawn
/// N(0, 1/fan_in), biases start at zero.
Network build_network(const ArchSpec& arch, RngStream& rng);

}  // namespace vshift
