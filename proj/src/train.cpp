#include "vshift/train.hpp"

#include <algorithm>
#include <cmath>

#include "vshift/errors.hpp"
#include "vshift/layers.hpp"
#include "vshift/textio.hpp"

namespace vshift {

namespace {

Tensor gather_rows(const Tensor& features, std::span<const std::size_t> rows) {
    const std::size_t d = features.cols();
    Tensor out({rows.size(), d});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* src = &features[rows[i] * d];
        double* dst = &out[i * d];
        std::copy(src, src + d, dst);
    }
    return out;
}

std::size_t argmax_row(const Tensor& t, std::size_t row) {
    const std::size_t k = t.cols();
    const double* r = &t[row * k];
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
        if (r[c] > r[best]) best = c;
    }
    return best;
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size < 2) {
        throw DomainError("batch size must be at least 2");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw DomainError("learning rate must be positive and finite");
    }
    if (!(momentum >= 0.0) || momentum >= 1.0) {
        throw DomainError("optimizer momentum must lie in [0, 1)");
    }
    if (!(lr_decay_factor > 0.0) || lr_decay_factor > 1.0) {
        throw DomainError("learning-rate decay factor must lie in (0, 1]");
    }
}

TrainHistory train(Network& net, const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.size() == 0) {
        throw DomainError("cannot train on an empty dataset");
    }
    if (data.features.rows() != data.labels.size()) {
        throw ShapeError("feature rows and labels disagree");
    }

    std::vector<ParamRef> params = net.parameters();
    std::vector<Tensor> velocity;
    velocity.reserve(params.size());
    for (const ParamRef& p : params) velocity.emplace_back(p.value->shape());

    RngStream shuffle_rng(cfg.seed, 1);
    RngStream noise_rng(cfg.seed, 2);
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainHistory history;
    double lr = cfg.learning_rate;
    SoftmaxXent xent;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (std::find(cfg.lr_decay_epochs.begin(), cfg.lr_decay_epochs.end(), epoch) !=
            cfg.lr_decay_epochs.end()) {
            lr *= cfg.lr_decay_factor;
        }
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[shuffle_rng.index(i)]);
        }

        // Batch boundaries; a trailing singleton joins the previous batch.
        std::vector<std::size_t> starts;
        for (std::size_t s = 0; s < order.size(); s += cfg.batch_size) starts.push_back(s);
        if (starts.size() > 1 && order.size() - starts.back() < 2) starts.pop_back();

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t b = 0; b < starts.size(); ++b) {
            const std::size_t lo = starts[b];
            const std::size_t hi = b + 1 < starts.size() ? starts[b + 1] : order.size();
            std::span<const std::size_t> rows(order.data() + lo, hi - lo);
            Tensor x = gather_rows(data.features, rows);
            std::vector<std::size_t> labels(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = data.labels[rows[i]];

            Tensor logits = net.forward(x, LayerMode::Train, noise_rng);
            const double loss = xent.forward(logits, labels);
            if (!std::isfinite(loss)) {
                throw DivergenceError(
                    epoch,
                    "training loss left the finite range at epoch " + format_u64(epoch));
            }
            loss_sum += loss * static_cast<double>(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (argmax_row(logits, i) == labels[i]) ++correct;
            }

            net.backward(xent.backward());
            for (std::size_t k = 0; k < params.size(); ++k) {
                Tensor& v = velocity[k];
                Tensor& value = *params[k].value;
                const Tensor& grad = *params[k].grad;
                for (std::size_t i = 0; i < value.size(); ++i) {
                    v[i] = cfg.momentum * v[i] - lr * grad[i];
                    value[i] += v[i];
                }
            }
        }
        EpochStats stats;
        stats.loss = loss_sum / static_cast<double>(order.size());
        stats.accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
        history.epochs.push_back(stats);
    }
    return history;
}

Tensor eval_logits(Network& net, const Tensor& features, std::size_t batch_size) {
    if (features.shape().size() != 2) {
        throw ShapeError("features must be a rank-2 batch");
    }
    if (batch_size == 0) {
        throw DomainError("batch size must be positive");
    }
    RngStream unused(0, 0);
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    Tensor out;
    bool first = true;
    for (std::size_t lo = 0; lo < n; lo += batch_size) {
        const std::size_t hi = std::min(n, lo + batch_size);
        Tensor x({hi - lo, d});
        std::copy(&features[lo * d], &features[hi * d], &x[0]);
        Tensor logits = net.forward(x, LayerMode::Eval, unused);
        if (first) {
            out = Tensor({n, logits.cols()});
            first = false;
        }
        std::copy(&logits[0], &logits[0] + logits.size(), &out[lo * logits.cols()]);
    }
    return out;
}

double eval_accuracy(Network& net, const Dataset& data, std::size_t batch_size) {
    if (data.size() == 0) {
        throw DomainError("cannot evaluate an empty dataset");
    }
    Tensor logits = eval_logits(net, data.features, batch_size);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (argmax_row(logits, i) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace vshift
