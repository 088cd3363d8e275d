#include "vshift/layers.hpp"

#include <algorithm>
#include <cmath>

#include "vshift/errors.hpp"

namespace vshift {

namespace {

void require_rank2(const Tensor& x, const char* who) {
    if (x.shape().size() != 2) {
        throw ShapeError(std::string(who) + " expects a rank-2 batch tensor");
    }
}

}  // namespace

DropoutLayer::DropoutLayer(double retain_ratio) : retain_(retain_ratio) {
    if (!(retain_ratio > 0.0) || retain_ratio > 1.0) {
        throw DomainError("dropout retain ratio must lie in (0, 1]");
    }
}

Tensor DropoutLayer::forward(const Tensor& x, LayerMode mode, RngStream& rng) {
    if (mode == LayerMode::Eval) {
        has_mask_ = false;
        return x;
    }
    Tensor out(x.shape());
    mask_ = Tensor(x.shape());
    const double inv_p = 1.0 / retain_;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = rng.bernoulli(retain_) ? 1.0 : 0.0;
        mask_[i] = keep;
        out[i] = keep * x[i] * inv_p;
    }
    has_mask_ = true;
    return out;
}

Tensor DropoutLayer::backward(const Tensor& grad_out) {
    if (!has_mask_) {
        throw StateError("dropout backward requires a mask from a preceding Train forward");
    }
    if (!grad_out.same_shape(mask_)) {
        throw ShapeError("dropout gradient shape does not match the cached mask");
    }
    Tensor grad_in(grad_out.shape());
    const double inv_p = 1.0 / retain_;
    for (std::size_t i = 0; i < grad_out.size(); ++i) {
        grad_in[i] = mask_[i] * grad_out[i] * inv_p;
    }
    return grad_in;
}

const Tensor& DropoutLayer::last_mask() const {
    if (!has_mask_) {
        throw StateError("no dropout mask has been cached");
    }
    return mask_;
}

UoutLayer::UoutLayer(double beta) : beta_(beta) {
    if (!(beta >= 0.0) || beta > 1.0) {
        throw DomainError("uniform-noise half-width must lie in [0, 1]");
    }
}

Tensor UoutLayer::forward(const Tensor& x, LayerMode mode, RngStream& rng) {
    if (mode == LayerMode::Eval) {
        has_gain_ = false;
        return x;
    }
    Tensor out(x.shape());
    gain_ = Tensor(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = beta_ == 0.0 ? 0.0 : beta_ * (2.0 * rng.uniform() - 1.0);
        gain_[i] = 1.0 + r;
        out[i] = x[i] * gain_[i];
    }
    has_gain_ = true;
    return out;
}

Tensor UoutLayer::backward(const Tensor& grad_out) {
    if (!has_gain_) {
        throw StateError("uout backward requires noise from a preceding Train forward");
    }
    if (!grad_out.same_shape(gain_)) {
        throw ShapeError("uout gradient shape does not match the cached noise");
    }
    Tensor grad_in(grad_out.shape());
    for (std::size_t i = 0; i < grad_out.size(); ++i) {
        grad_in[i] = gain_[i] * grad_out[i];
    }
    return grad_in;
}

MovingStats::MovingStats(std::size_t channels, double momentum, StatsPolicy policy)
    : mean_(channels, 0.0), var_(channels, 1.0), momentum_(momentum), policy_(policy) {
    if (channels == 0) {
        throw DomainError("moving statistics need at least one channel");
    }
    if (!(momentum > 0.0) || momentum > 1.0) {
        throw DomainError("moving-average momentum must lie in (0, 1]");
    }
}

void MovingStats::update(std::span<const double> batch_mean,
                         std::span<const double> batch_var_biased, std::size_t batch_size) {
    if (batch_mean.size() != mean_.size() || batch_var_biased.size() != var_.size()) {
        throw ShapeError("batch statistics channel count mismatch");
    }
    if (batch_size < 2) {
        throw ShapeError("moving statistics need batches of at least 2 samples");
    }
    const double correction =
        static_cast<double>(batch_size) / static_cast<double>(batch_size - 1);
    if (policy_ == StatsPolicy::Ema) {
        for (std::size_t c = 0; c < mean_.size(); ++c) {
            mean_[c] = (1.0 - momentum_) * mean_[c] + momentum_ * batch_mean[c];
            var_[c] = (1.0 - momentum_) * var_[c] +
                      momentum_ * correction * batch_var_biased[c];
        }
    } else {
        const double n = static_cast<double>(updates_);
        for (std::size_t c = 0; c < mean_.size(); ++c) {
            mean_[c] = (n * mean_[c] + batch_mean[c]) / (n + 1.0);
            var_[c] = (n * var_[c] + correction * batch_var_biased[c]) / (n + 1.0);
        }
    }
    ++updates_;
}

void MovingStats::set_values(std::span<const double> mean, std::span<const double> variance) {
    if (mean.size() != mean_.size() || variance.size() != var_.size()) {
        throw ShapeError("statistics channel count mismatch");
    }
    for (double v : variance) {
        if (!(v >= 0.0)) {
            throw DomainError("moving variance must be non-negative");
        }
    }
    std::copy(mean.begin(), mean.end(), mean_.begin());
    std::copy(variance.begin(), variance.end(), var_.begin());
}

void MovingStats::reset() {
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(var_.begin(), var_.end(), 1.0);
    updates_ = 0;
}

BatchNormLayer::BatchNormLayer(std::size_t channels, double momentum, double epsilon,
                               bool affine)
    : channels_(channels),
      epsilon_(epsilon),
      affine_(affine),
      moving_(channels, momentum) {
    if (!(epsilon > 0.0)) {
        throw DomainError("normalization epsilon must be positive");
    }
    if (affine_) {
        gamma_ = Tensor({channels});
        beta_ = Tensor({channels});
        gamma_grad_ = Tensor({channels});
        beta_grad_ = Tensor({channels});
        for (std::size_t c = 0; c < channels; ++c) gamma_[c] = 1.0;
    }
}

void BatchNormLayer::batch_moments(const Tensor& x, std::vector<double>& mean,
                                   std::vector<double>& var_biased) {
    require_rank2(x, "batch moments");
    const std::size_t m = x.rows();
    const std::size_t d = x.cols();
    if (m == 0) {
        throw ShapeError("batch moments need at least one sample");
    }
    mean.assign(d, 0.0);
    var_biased.assign(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        std::span<const double> row = x.row(i);
        for (std::size_t c = 0; c < d; ++c) mean[c] += row[c];
    }
    for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::span<const double> row = x.row(i);
        for (std::size_t c = 0; c < d; ++c) {
            const double dlt = row[c] - mean[c];
            var_biased[c] += dlt * dlt;
        }
    }
    for (std::size_t c = 0; c < d; ++c) var_biased[c] /= static_cast<double>(m);
}

Tensor BatchNormLayer::forward(const Tensor& x, LayerMode mode, RngStream&) {
    require_rank2(x, "batch normalization");
    if (x.cols() != channels_) {
        throw ShapeError("batch width does not match normalization channels");
    }
    if (tap_) tap_(x);
    const std::size_t m = x.rows();
    const std::size_t d = channels_;
    Tensor out(x.shape());

    if (mode == LayerMode::Eval) {
        has_cache_ = false;
        std::span<const double> mu = moving_.mean();
        std::span<const double> var = moving_.variance();
        std::vector<double> scale(d);
        for (std::size_t c = 0; c < d; ++c) scale[c] = 1.0 / std::sqrt(var[c] + epsilon_);
        for (std::size_t i = 0; i < m; ++i) {
            std::span<const double> row = x.row(i);
            double* orow = &out[i * d];
            for (std::size_t c = 0; c < d; ++c) {
                double y = (row[c] - mu[c]) * scale[c];
                if (affine_) y = gamma_[c] * y + beta_[c];
                orow[c] = y;
            }
        }
        return out;
    }

    if (m < 2) {
        throw ShapeError("Train-mode normalization needs batches of at least 2 samples");
    }
    std::vector<double> mu, var;
    batch_moments(x, mu, var);
    inv_std_.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) inv_std_[c] = 1.0 / std::sqrt(var[c] + epsilon_);
    x_hat_ = Tensor(x.shape());
    for (std::size_t i = 0; i < m; ++i) {
        std::span<const double> row = x.row(i);
        double* hrow = &x_hat_[i * d];
        double* orow = &out[i * d];
        for (std::size_t c = 0; c < d; ++c) {
            const double h = (row[c] - mu[c]) * inv_std_[c];
            hrow[c] = h;
            orow[c] = affine_ ? gamma_[c] * h + beta_[c] : h;
        }
    }
    moving_.update(mu, var, m);
    has_cache_ = true;
    return out;
}

Tensor BatchNormLayer::backward(const Tensor& grad_out) {
    if (!has_cache_) {
        throw StateError("normalization backward requires a preceding Train forward");
    }
    if (!grad_out.same_shape(x_hat_)) {
        throw ShapeError("normalization gradient shape does not match the cached batch");
    }
    const std::size_t m = x_hat_.rows();
    const std::size_t d = channels_;
    const double mf = static_cast<double>(m);

    // Gradient with respect to x_hat; affine scale folds in here.
    Tensor g_hat(grad_out.shape());
    for (std::size_t i = 0; i < m; ++i) {
        const double* grow = &grad_out[i * d];
        double* hrow = &g_hat[i * d];
        for (std::size_t c = 0; c < d; ++c) {
            hrow[c] = affine_ ? grow[c] * gamma_[c] : grow[c];
        }
    }
    if (affine_) {
        for (std::size_t c = 0; c < d; ++c) {
            gamma_grad_[c] = 0.0;
            beta_grad_[c] = 0.0;
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double* grow = &grad_out[i * d];
            const double* hrow = &x_hat_[i * d];
            for (std::size_t c = 0; c < d; ++c) {
                gamma_grad_[c] += grow[c] * hrow[c];
                beta_grad_[c] += grow[c];
            }
        }
    }

    std::vector<double> sum_g(d, 0.0), sum_gh(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* grow = &g_hat[i * d];
        const double* hrow = &x_hat_[i * d];
        for (std::size_t c = 0; c < d; ++c) {
            sum_g[c] += grow[c];
            sum_gh[c] += grow[c] * hrow[c];
        }
    }
    Tensor grad_in(grad_out.shape());
    for (std::size_t i = 0; i < m; ++i) {
        const double* grow = &g_hat[i * d];
        const double* hrow = &x_hat_[i * d];
        double* irow = &grad_in[i * d];
        for (std::size_t c = 0; c < d; ++c) {
            irow[c] = inv_std_[c] / mf * (mf * grow[c] - sum_g[c] - hrow[c] * sum_gh[c]);
        }
    }
    return grad_in;
}

std::vector<ParamRef> BatchNormLayer::parameters() {
    if (!affine_) return {};
    return {{"gamma", &gamma_, &gamma_grad_}, {"beta", &beta_, &beta_grad_}};
}

DenseLayer::DenseLayer(std::size_t in_width, std::size_t out_width, bool bias)
    : in_(in_width),
      out_(out_width),
      bias_enabled_(bias),
      weights_({out_width, in_width}),
      bias_({out_width}),
      weights_grad_({out_width, in_width}),
      bias_grad_({out_width}) {
    if (in_width == 0 || out_width == 0) {
        throw DomainError("dense layer widths must be positive");
    }
}

Tensor DenseLayer::forward(const Tensor& x, LayerMode, RngStream&) {
    require_rank2(x, "dense layer");
    if (x.cols() != in_) {
        throw ShapeError("batch width does not match dense input width");
    }
    const std::size_t m = x.rows();
    Tensor out({m, out_});
    for (std::size_t i = 0; i < m; ++i) {
        std::span<const double> row = x.row(i);
        double* orow = &out[i * out_];
        for (std::size_t o = 0; o < out_; ++o) {
            const double* wrow = &weights_[o * in_];
            double acc = bias_enabled_ ? bias_[o] : 0.0;
            for (std::size_t k = 0; k < in_; ++k) acc += wrow[k] * row[k];
            orow[o] = acc;
        }
    }
    input_ = x;
    has_input_ = true;
    return out;
}

Tensor DenseLayer::backward(const Tensor& grad_out) {
    if (!has_input_) {
        throw StateError("dense backward requires a preceding forward");
    }
    require_rank2(grad_out, "dense backward");
    if (grad_out.cols() != out_ || grad_out.rows() != input_.rows()) {
        throw ShapeError("dense gradient shape does not match the cached batch");
    }
    const std::size_t m = input_.rows();
    for (std::size_t i = 0; i < weights_grad_.size(); ++i) weights_grad_[i] = 0.0;
    for (std::size_t o = 0; o < out_; ++o) bias_grad_[o] = 0.0;

    Tensor grad_in({m, in_});
    for (std::size_t i = 0; i < m; ++i) {
        const double* grow = &grad_out[i * out_];
        std::span<const double> xrow = input_.row(i);
        double* irow = &grad_in[i * in_];
        for (std::size_t k = 0; k < in_; ++k) irow[k] = 0.0;
        for (std::size_t o = 0; o < out_; ++o) {
            const double g = grow[o];
            if (g == 0.0) continue;
            double* wgrow = &weights_grad_[o * in_];
            const double* wrow = &weights_[o * in_];
            for (std::size_t k = 0; k < in_; ++k) {
                wgrow[k] += g * xrow[k];
                irow[k] += g * wrow[k];
            }
            bias_grad_[o] += g;
        }
    }
    return grad_in;
}

std::vector<ParamRef> DenseLayer::parameters() {
    std::vector<ParamRef> ps{{"weight", &weights_, &weights_grad_}};
    if (bias_enabled_) ps.push_back({"bias", &bias_, &bias_grad_});
    return ps;
}

Tensor ReluLayer::forward(const Tensor& x, LayerMode, RngStream&) {
    Tensor out(x.shape());
    active_ = Tensor(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool on = x[i] > 0.0;
        active_[i] = on ? 1.0 : 0.0;
        out[i] = on ? x[i] : 0.0;
    }
    has_cache_ = true;
    return out;
}

Tensor ReluLayer::backward(const Tensor& grad_out) {
    if (!has_cache_) {
        throw StateError("relu backward requires a preceding forward");
    }
    if (!grad_out.same_shape(active_)) {
        throw ShapeError("relu gradient shape does not match the cached batch");
    }
    Tensor grad_in(grad_out.shape());
    for (std::size_t i = 0; i < grad_out.size(); ++i) {
        grad_in[i] = active_[i] * grad_out[i];
    }
    return grad_in;
}

double SoftmaxXent::forward(const Tensor& logits, std::span<const std::size_t> labels) {
    require_rank2(logits, "softmax cross-entropy");
    const std::size_t m = logits.rows();
    const std::size_t k = logits.cols();
    if (labels.size() != m) {
        throw ShapeError("label count does not match batch size");
    }
    probs_ = Tensor(logits.shape());
    labels_.assign(labels.begin(), labels.end());
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (labels[i] >= k) {
            throw DomainError("class label out of range");
        }
        std::span<const double> row = logits.row(i);
        double peak = row[0];
        for (std::size_t c = 1; c < k; ++c) peak = std::max(peak, row[c]);
        double denom = 0.0;
        double* prow = &probs_[i * k];
        for (std::size_t c = 0; c < k; ++c) {
            prow[c] = std::exp(row[c] - peak);
            denom += prow[c];
        }
        for (std::size_t c = 0; c < k; ++c) prow[c] /= denom;
        loss -= std::log(prow[labels[i]]);
    }
    has_cache_ = true;
    return loss / static_cast<double>(m);
}

Tensor SoftmaxXent::backward() const {
    if (!has_cache_) {
        throw StateError("loss backward requires a preceding forward");
    }
    const std::size_t m = probs_.rows();
    const std::size_t k = probs_.cols();
    Tensor grad(probs_.shape());
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* prow = &probs_[i * k];
        double* grow = &grad[i * k];
        for (std::size_t c = 0; c < k; ++c) {
            grow[c] = (prow[c] - (c == labels_[i] ? 1.0 : 0.0)) * inv_m;
        }
    }
    return grad;
}

const Tensor& SoftmaxXent::probabilities() const {
    if (!has_cache_) {
        throw StateError("no cached class probabilities");
    }
    return probs_;
}

}  // namespace vshift
