#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vshift/rng.hpp"
#include "vshift/tensor.hpp"

namespace vshift {

enum class LayerMode { Train, Eval };

/// Non-owning handle to one learnable parameter and its gradient slot.
struct ParamRef {
    std::string name;
    Tensor* value = nullptr;
    Tensor* grad = nullptr;
};

/// Batches are rank-2 tensors, rows are samples.
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x, LayerMode mode, RngStream& rng) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual std::size_t output_width(std::size_t input_width) const { return input_width; }
    virtual std::string_view kind() const = 0;
    virtual std::vector<ParamRef> parameters() { return {}; }
};

/// Inverted dropout: Train scales retained units by 1/retain, Eval is identity.
class DropoutLayer final : public Layer {
public:
    explicit DropoutLayer(double retain_ratio);

    Tensor forward(const Tensor& x, LayerMode mode, RngStream& rng) override;
    /// Requires a mask cached by the immediately preceding Train forward.
    Tensor backward(const Tensor& grad_out) override;
    std::string_view kind() const override { return "dropout"; }

    double retain_ratio() const { return retain_; }
    const Tensor& last_mask() const;

private:
    double retain_;
    Tensor mask_;
    bool has_mask_ = false;
};

/// Multiplicative uniform noise x(1 + r), r ~ U(-beta, beta); Eval is identity.
class UoutLayer final : public Layer {
public:
    explicit UoutLayer(double beta);

    Tensor forward(const Tensor& x, LayerMode mode, RngStream& rng) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string_view kind() const override { return "uout"; }

    double beta() const { return beta_; }

private:
    double beta_;
    Tensor gain_;  // cached 1 + r
    bool has_gain_ = false;
};

enum class StatsPolicy { Ema, Cumulative };

/// Per-channel moving mean/variance accumulator. Batch variances arrive
/// biased (divided by m); the accumulator applies the m/(m-1) correction
/// before folding them in. Shared verbatim between normalization layers and
/// the variance-scan diagnostics.
class MovingStats {
public:
    MovingStats(std::size_t channels, double momentum, StatsPolicy policy = StatsPolicy::Ema);

    void update(std::span<const double> batch_mean,
                std::span<const double> batch_var_biased, std::size_t batch_size);

    std::span<const double> mean() const { return mean_; }
    std::span<const double> variance() const { return var_; }
    std::size_t channels() const { return mean_.size(); }
    double momentum() const { return momentum_; }
    StatsPolicy policy() const { return policy_; }
    std::uint64_t update_count() const { return updates_; }

    /// Overwrites the accumulated statistics; variances must be >= 0.
    void set_values(std::span<const double> mean, std::span<const double> variance);
    void set_update_count(std::uint64_t n) { updates_ = n; }
    void reset();

private:
    std::vector<double> mean_;
    std::vector<double> var_;
    double momentum_;
    StatsPolicy policy_;
    std::uint64_t updates_ = 0;
};

/// Batch normalization, "normalize" part only by default. Train mode
/// normalizes by current-batch statistics and folds them into the moving
/// accumulator; Eval normalizes by the accumulator and touches nothing.
class BatchNormLayer final : public Layer {
public:
    BatchNormLayer(std::size_t channels, double momentum = 0.1, double epsilon = 1e-5,
                   bool affine = false);

    Tensor forward(const Tensor& x, LayerMode mode, RngStream& rng) override;
    /// Full batch-coupled gradient through the batch mean and variance.
    Tensor backward(const Tensor& grad_out) override;
    std::string_view kind() const override { return "batchnorm"; }
    std::vector<ParamRef> parameters() override;

    std::size_t channels() const { return channels_; }
    double epsilon() const { return epsilon_; }
    bool affine() const { return affine_; }
    MovingStats& moving_stats() { return moving_; }
    const MovingStats& moving_stats() const { return moving_; }

    /// Observation hook fired with the raw input of every forward, both modes.
    void set_input_tap(std::function<void(const Tensor&)> tap) { tap_ = std::move(tap); }

    /// Per-channel mean and biased variance of a rank-2 batch.
    static void batch_moments(const Tensor& x, std::vector<double>& mean,
                              std::vector<double>& var_biased);

private:
    std::size_t channels_;
    double epsilon_;
    bool affine_;
    MovingStats moving_;
    Tensor gamma_, beta_, gamma_grad_, beta_grad_;
    std::function<void(const Tensor&)> tap_;

    Tensor x_hat_;                 // cached normalized batch, pre-affine
    std::vector<double> inv_std_;  // cached per-channel 1/sqrt(var + eps)
    bool has_cache_ = false;
};

class DenseLayer final : public Layer {
public:
    DenseLayer(std::size_t in_width, std::size_t out_width, bool bias = true);

    Tensor forward(const Tensor& x, LayerMode mode, RngStream& rng) override;
    Tensor backward(const Tensor& grad_out) override;
    std::size_t output_width(std::size_t) const override { return out_; }
    std::string_view kind() const override { return "dense"; }
    std::vector<ParamRef> parameters() override;

    std::size_t in_width() const { return in_; }
    std::size_t out_width() const { return out_; }
    bool has_bias() const { return bias_enabled_; }
    Tensor& weights() { return weights_; }
    const Tensor& weights() const { return weights_; }
    Tensor& bias() { return bias_; }

private:
    std::size_t in_, out_;
    bool bias_enabled_;
    Tensor weights_, bias_, weights_grad_, bias_grad_;
    Tensor input_;
    bool has_input_ = false;
};

class ReluLayer final : public Layer {
public:
    Tensor forward(const Tensor& x, LayerMode mode, RngStream& rng) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string_view kind() const override { return "relu"; }

private:
    Tensor active_;  // cached 0/1 activation pattern
    bool has_cache_ = false;
};

/// Softmax followed by cross-entropy with mean reduction over the batch.
class SoftmaxXent {
public:
    double forward(const Tensor& logits, std::span<const std::size_t> labels);
    /// Gradient with respect to the logits of the cached forward.
    Tensor backward() const;
    const Tensor& probabilities() const;

private:
    Tensor probs_;
    std::vector<std::size_t> labels_;
    bool has_cache_ = false;
};

}  // namespace vshift
