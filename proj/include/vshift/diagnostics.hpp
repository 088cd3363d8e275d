#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vshift/dataset.hpp"
#include "vshift/network.hpp"

namespace vshift {

struct LayerShift {
    std::size_t layer_index = 0;  // 1-based, shallow to deep
    double moving_var = 0.0;      // channel mean of the accumulated moving variance
    double real_var = 0.0;        // channel mean re-estimated in Eval mode
    double max_ratio = 1.0;       // max(real/moving, moving/real), >= 1
};

struct ConsistencyReport {
    double train_mode_acc = 0.0;
    double eval_mode_acc = 0.0;
    double flip_rate = 0.0;  // vote-correct but Eval-incorrect
};

struct ShiftReport {
    std::vector<LayerShift> layers;
    std::optional<ConsistencyReport> consistency;
};

double geometric_mean_max_ratio(const ShiftReport& report);

struct ScanOptions {
    std::size_t passes = 10;     // epochs of Eval-mode streaming
    std::size_t batch_size = 32; // mirrors the training batch size
    StatsPolicy policy = StatsPolicy::Ema;
};

/// Compares each normalization layer's accumulated moving variance against
/// the variance of its inputs re-estimated with the same moving-average
/// update while the network runs in Eval mode. The network is unchanged on
/// exit. Requires a trained network with at least one normalization layer.
ShiftReport scan_variance_shift(Network& net, const Dataset& data,
                                const ScanOptions& opt, RngStream& rng);

struct AdjustOptions {
    std::size_t passes = 10;      // epochs of Eval-mode streaming per layer
    std::size_t batch_size = 32;  // mirrors the training batch size
    StatsPolicy policy = StatsPolicy::Cumulative;
};

/// Replaces every normalization layer's moving statistics with statistics
/// accumulated while the network runs in Eval mode over `data`. Layers are
/// re-estimated shallow to deep, each with the shallower corrections already
/// installed, so one call reaches the fixed point and a second call only
/// moves statistics by accumulation noise. Learnable parameters are
/// untouched. passes = 0 leaves the network unchanged.
void adjust_bn_statistics(Network& net, const Dataset& data, const AdjustOptions& opt,
                          RngStream& rng);

struct ConsistencyOptions {
    std::size_t votes = 8;  // stochastic Train-mode passes per sample
    std::size_t batch_size = 64;
};

/// Train-mode (majority vote over stochastic passes) versus Eval-mode
/// accuracy on a labeled dataset. Moving statistics are restored afterwards.
ConsistencyReport prediction_consistency(Network& net, const Dataset& data,
                                         const ConsistencyOptions& opt, RngStream& rng);

struct LogitDivergence {
    std::vector<double> train_logits;  // mean class responses over stochastic passes
    std::vector<double> eval_logits;
    bool argmax_changed = false;
};

/// Paired Train/Eval class responses for every row of `data`, batched so the
/// samples provide each other's normalization context.
std::vector<LogitDivergence> logit_divergence_all(Network& net, const Dataset& data,
                                                  const ConsistencyOptions& opt,
                                                  RngStream& rng);

/// Single-sample variant; `context` supplies the batch the sample rides in.
LogitDivergence logit_divergence(Network& net, std::span<const double> sample,
                                 const Tensor& context, const ConsistencyOptions& opt,
                                 RngStream& rng);

}  // namespace vshift
