#pragma once

#include <cstdint>
#include <vector>

#include "vshift/dataset.hpp"
#include "vshift/network.hpp"

namespace vshift {

struct TrainConfig {
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    double learning_rate = 0.1;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    std::vector<std::size_t> lr_decay_epochs;  // zero-based epochs where lr drops
    double lr_decay_factor = 0.1;

    void validate() const;
};

struct EpochStats {
    double loss = 0.0;      // mean Train-mode loss over the epoch's batches
    double accuracy = 0.0;  // Train-mode accuracy over the epoch
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
};

/// Mini-batch SGD with momentum and step decay. Shuffles per epoch from a
/// dedicated stream; a trailing single-sample batch is folded into its
/// predecessor so normalization always sees at least two samples. Throws
/// DivergenceError naming the epoch if the loss leaves the finite range.
TrainHistory train(Network& net, const Dataset& data, const TrainConfig& cfg);

/// Deterministic Eval-mode accuracy, streamed in fixed-size batches.
double eval_accuracy(Network& net, const Dataset& data, std::size_t batch_size = 256);

/// Eval-mode class responses for every row of `features`.
Tensor eval_logits(Network& net, const Tensor& features, std::size_t batch_size = 256);

}  // namespace vshift
