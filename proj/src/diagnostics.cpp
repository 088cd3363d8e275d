#include "vshift/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "vshift/errors.hpp"

namespace vshift {

namespace {

struct BnSnapshot {
    std::vector<std::vector<double>> means, vars;
    std::vector<std::uint64_t> counts;
};

BnSnapshot snapshot_bn(Network& net) {
    BnSnapshot snap;
    for (BatchNormLayer* bn : net.batchnorm_layers()) {
        const MovingStats& ms = bn->moving_stats();
        snap.means.emplace_back(ms.mean().begin(), ms.mean().end());
        snap.vars.emplace_back(ms.variance().begin(), ms.variance().end());
        snap.counts.push_back(ms.update_count());
    }
    return snap;
}

void restore_bn(Network& net, const BnSnapshot& snap) {
    std::vector<BatchNormLayer*> bns = net.batchnorm_layers();
    for (std::size_t i = 0; i < bns.size(); ++i) {
        bns[i]->moving_stats().set_values(snap.means[i], snap.vars[i]);
        bns[i]->moving_stats().set_update_count(snap.counts[i]);
    }
}

std::vector<BatchNormLayer*> checked_bn_layers(Network& net) {
    std::vector<BatchNormLayer*> bns = net.batchnorm_layers();
    if (bns.empty()) {
        throw StateError("network has no normalization layers to scan");
    }
    for (const BatchNormLayer* bn : bns) {
        if (bn->moving_stats().update_count() == 0) {
            throw StateError("network has never accumulated moving statistics");
        }
    }
    return bns;
}

double channel_mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Batch row ranges over a shuffled order; a trailing singleton joins the
/// previous batch so normalization contexts always have at least 2 samples.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n,
                                                              std::size_t batch) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t lo = 0; lo < n; lo += batch) {
        out.emplace_back(lo, std::min(n, lo + batch));
    }
    if (out.size() > 1 && out.back().second - out.back().first < 2) {
        out.pop_back();
        out.back().second = n;
    }
    return out;
}

Tensor gather(const Tensor& features, std::span<const std::size_t> order, std::size_t lo,
              std::size_t hi) {
    const std::size_t d = features.cols();
    Tensor x({hi - lo, d});
    for (std::size_t i = lo; i < hi; ++i) {
        const double* src = &features[order[i] * d];
        std::copy(src, src + d, &x[(i - lo) * d]);
    }
    return x;
}

void shuffle(std::vector<std::size_t>& order, RngStream& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.index(i)]);
    }
}

/// Streams `data` in Eval mode for `passes` epochs and feeds every
/// normalization layer's input batches into a fresh accumulator driven by
/// the exact update rule the layer itself uses in training.
std::vector<MovingStats> accumulate_eval_stats(Network& net, const Dataset& data,
                                               const ScanOptions& opt, RngStream& rng) {
    std::vector<BatchNormLayer*> bns = checked_bn_layers(net);
    if (data.size() < 2) {
        throw DomainError("scanning needs at least 2 samples");
    }
    if (opt.batch_size < 2) {
        throw DomainError("scan batch size must be at least 2");
    }

    std::vector<MovingStats> acc;
    acc.reserve(bns.size());
    for (BatchNormLayer* bn : bns) {
        acc.emplace_back(bn->channels(), bn->moving_stats().momentum(), opt.policy);
    }
    for (std::size_t i = 0; i < bns.size(); ++i) {
        MovingStats* sink = &acc[i];
        bns[i]->set_input_tap([sink](const Tensor& x) {
            std::vector<double> mean, var;
            BatchNormLayer::batch_moments(x, mean, var);
            sink->update(mean, var, x.rows());
        });
    }

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    RngStream unused(0, 0);
    for (std::size_t pass = 0; pass < opt.passes; ++pass) {
        shuffle(order, rng);
        for (auto [lo, hi] : batch_ranges(order.size(), opt.batch_size)) {
            Tensor x = gather(data.features, order, lo, hi);
            net.forward(x, LayerMode::Eval, unused);
        }
    }
    for (BatchNormLayer* bn : bns) bn->set_input_tap(nullptr);
    return acc;
}

}  // namespace

double geometric_mean_max_ratio(const ShiftReport& report) {
    if (report.layers.empty()) {
        throw StateError("report has no layer records");
    }
    double log_sum = 0.0;
    for (const LayerShift& layer : report.layers) log_sum += std::log(layer.max_ratio);
    return std::exp(log_sum / static_cast<double>(report.layers.size()));
}

ShiftReport scan_variance_shift(Network& net, const Dataset& data, const ScanOptions& opt,
                                RngStream& rng) {
    if (opt.passes == 0) {
        throw DomainError("scanning needs at least one pass");
    }
    std::vector<BatchNormLayer*> bns = checked_bn_layers(net);
    std::vector<MovingStats> acc = accumulate_eval_stats(net, data, opt, rng);

    ShiftReport report;
    for (std::size_t i = 0; i < bns.size(); ++i) {
        LayerShift row;
        row.layer_index = i + 1;
        row.moving_var = channel_mean(bns[i]->moving_stats().variance());
        row.real_var = channel_mean(acc[i].variance());
        row.max_ratio = std::max(row.real_var / row.moving_var,
                                 row.moving_var / row.real_var);
        report.layers.push_back(row);
    }
    return report;
}

void adjust_bn_statistics(Network& net, const Dataset& data, const AdjustOptions& opt,
                          RngStream& rng) {
    std::vector<BatchNormLayer*> bns = checked_bn_layers(net);
    if (opt.passes == 0) {
        return;
    }
    ScanOptions pass_opt;
    pass_opt.passes = opt.passes;
    pass_opt.batch_size = opt.batch_size;
    pass_opt.policy = opt.policy;
    // A layer's Eval-mode input depends only on shallower statistics, so
    // installing shallow to deep makes each round's estimate final.
    for (std::size_t k = 0; k < bns.size(); ++k) {
        std::vector<MovingStats> acc = accumulate_eval_stats(net, data, pass_opt, rng);
        bns[k]->moving_stats().set_values(acc[k].mean(), acc[k].variance());
        bns[k]->moving_stats().set_update_count(acc[k].update_count());
    }
}

ConsistencyReport prediction_consistency(Network& net, const Dataset& data,
                                         const ConsistencyOptions& opt, RngStream& rng) {
    if (data.size() < 2) {
        throw DomainError("consistency check needs at least 2 samples");
    }
    if (opt.votes == 0) {
        throw DomainError("consistency check needs at least one stochastic pass");
    }
    if (opt.batch_size < 2) {
        throw DomainError("consistency batch size must be at least 2");
    }

    RngStream unused(0, 0);
    const std::size_t n = data.size();
    const std::size_t classes = [&] {
        Tensor probe({2, data.features.cols()});
        for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = data.features[i];
        return net.forward(probe, LayerMode::Eval, unused).cols();
    }();

    // Eval predictions first; Eval touches no state.
    std::vector<std::size_t> eval_pred(n);
    {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (auto [lo, hi] : batch_ranges(n, opt.batch_size)) {
            Tensor x = gather(data.features, order, lo, hi);
            Tensor logits = net.forward(x, LayerMode::Eval, unused);
            for (std::size_t i = lo; i < hi; ++i) {
                const double* row = &logits[(i - lo) * classes];
                std::size_t best = 0;
                for (std::size_t c = 1; c < classes; ++c) {
                    if (row[c] > row[best]) best = c;
                }
                eval_pred[i] = best;
            }
        }
    }

    // Train-mode votes; moving statistics restored afterwards.
    BnSnapshot snap = snapshot_bn(net);
    std::vector<std::vector<std::size_t>> votes(n, std::vector<std::size_t>(classes, 0));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t pass = 0; pass < opt.votes; ++pass) {
        shuffle(order, rng);
        for (auto [lo, hi] : batch_ranges(n, opt.batch_size)) {
            Tensor x = gather(data.features, order, lo, hi);
            Tensor logits = net.forward(x, LayerMode::Train, rng);
            for (std::size_t i = lo; i < hi; ++i) {
                const double* row = &logits[(i - lo) * classes];
                std::size_t best = 0;
                for (std::size_t c = 1; c < classes; ++c) {
                    if (row[c] > row[best]) best = c;
                }
                ++votes[order[i]][best];
            }
        }
    }
    restore_bn(net, snap);

    std::size_t vote_correct = 0, eval_correct = 0, flips = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t winner = 0;  // ties break toward the lowest class id
        for (std::size_t c = 1; c < classes; ++c) {
            if (votes[i][c] > votes[i][winner]) winner = c;
        }
        const bool v_ok = winner == data.labels[i];
        const bool e_ok = eval_pred[i] == data.labels[i];
        if (v_ok) ++vote_correct;
        if (e_ok) ++eval_correct;
        if (v_ok && !e_ok) ++flips;
    }
    ConsistencyReport rep;
    rep.train_mode_acc = static_cast<double>(vote_correct) / static_cast<double>(n);
    rep.eval_mode_acc = static_cast<double>(eval_correct) / static_cast<double>(n);
    rep.flip_rate = static_cast<double>(flips) / static_cast<double>(n);
    return rep;
}

std::vector<LogitDivergence> logit_divergence_all(Network& net, const Dataset& data,
                                                  const ConsistencyOptions& opt,
                                                  RngStream& rng) {
    if (data.size() < 2) {
        throw DomainError("divergence check needs at least 2 samples");
    }
    if (opt.votes == 0) {
        throw DomainError("divergence check needs at least one stochastic pass");
    }
    if (opt.batch_size < 2) {
        throw DomainError("divergence batch size must be at least 2");
    }
    RngStream unused(0, 0);
    const std::size_t n = data.size();

    std::vector<LogitDivergence> out(n);
    std::size_t classes = 0;
    {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (auto [lo, hi] : batch_ranges(n, opt.batch_size)) {
            Tensor x = gather(data.features, order, lo, hi);
            Tensor logits = net.forward(x, LayerMode::Eval, unused);
            classes = logits.cols();
            for (std::size_t i = lo; i < hi; ++i) {
                const double* row = &logits[(i - lo) * classes];
                out[i].eval_logits.assign(row, row + classes);
            }
        }
    }
    for (LogitDivergence& d : out) d.train_logits.assign(classes, 0.0);

    BnSnapshot snap = snapshot_bn(net);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t pass = 0; pass < opt.votes; ++pass) {
        shuffle(order, rng);
        for (auto [lo, hi] : batch_ranges(n, opt.batch_size)) {
            Tensor x = gather(data.features, order, lo, hi);
            Tensor logits = net.forward(x, LayerMode::Train, rng);
            for (std::size_t i = lo; i < hi; ++i) {
                const double* row = &logits[(i - lo) * classes];
                for (std::size_t c = 0; c < classes; ++c) {
                    out[order[i]].train_logits[c] += row[c];
                }
            }
        }
    }
    restore_bn(net, snap);

    const double inv = 1.0 / static_cast<double>(opt.votes);
    for (LogitDivergence& d : out) {
        std::size_t train_best = 0, eval_best = 0;
        for (std::size_t c = 0; c < classes; ++c) {
            d.train_logits[c] *= inv;
            if (d.train_logits[c] > d.train_logits[train_best]) train_best = c;
            if (d.eval_logits[c] > d.eval_logits[eval_best]) eval_best = c;
        }
        d.argmax_changed = train_best != eval_best;
    }
    return out;
}

LogitDivergence logit_divergence(Network& net, std::span<const double> sample,
                                 const Tensor& context, const ConsistencyOptions& opt,
                                 RngStream& rng) {
    if (context.shape().size() != 2 || context.rows() < 1) {
        throw ShapeError("context must be a non-empty rank-2 batch");
    }
    if (context.cols() != sample.size()) {
        throw ShapeError("sample width does not match the context batch");
    }
    Dataset tiny;
    tiny.features = Tensor({context.rows() + 1, context.cols()});
    std::copy(context.values().begin(), context.values().end(), &tiny.features[0]);
    std::copy(sample.begin(), sample.end(), &tiny.features[context.rows() * context.cols()]);
    tiny.labels.assign(context.rows() + 1, 0);

    ConsistencyOptions batched = opt;
    batched.batch_size = std::max<std::size_t>(2, tiny.size());
    std::vector<LogitDivergence> all = logit_divergence_all(net, tiny, batched, rng);
    return all.back();
}

}  // namespace vshift
