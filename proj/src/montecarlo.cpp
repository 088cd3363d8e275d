#include "vshift/montecarlo.hpp"

#include <cmath>
#include <future>

#include "vshift/errors.hpp"
#include "vshift/sampling.hpp"
#include "vshift/textio.hpp"

namespace vshift {

namespace {

constexpr std::size_t kBatches = 100;
constexpr std::size_t kMinSamples = 10000;

std::size_t checked_batch_size(std::size_t n) {
    if (n < kMinSamples) {
        throw DomainError("Monte Carlo runs need at least 10000 samples");
    }
    return n / kBatches;
}

McEstimate batch_means_estimate(double full_value, std::span<const double> batch_values,
                                std::size_t n_samples) {
    StreamingMoments spread;
    for (double v : batch_values) spread.add(v);
    McEstimate e;
    e.value = full_value;
    e.n_samples = n_samples;
    e.stderr_value = batch_values.size() >= 2
                         ? std::sqrt(spread.variance_unbiased() /
                                     static_cast<double>(batch_values.size()))
                         : 0.0;
    return e;
}

}  // namespace

ShiftAccumulator::ShiftAccumulator(std::size_t batch_size) : batch_size_(batch_size) {
    if (batch_size < 2) {
        throw DomainError("batch-means batches need at least 2 samples");
    }
}

void ShiftAccumulator::add_pair(double train_value, double test_value) {
    cur_train_.add(train_value);
    cur_test_.add(test_value);
    all_train_.add(train_value);
    all_test_.add(test_value);
    if (cur_train_.count() == batch_size_) close_batch();
}

void ShiftAccumulator::close_batch() {
    const double tr = cur_train_.variance_unbiased();
    const double te = cur_test_.variance_unbiased();
    batch_train_var_.push_back(tr);
    batch_test_var_.push_back(te);
    batch_ratio_.push_back(te / tr);
    cur_train_ = StreamingMoments{};
    cur_test_ = StreamingMoments{};
}

void ShiftAccumulator::merge(const ShiftAccumulator& other) {
    if (other.batch_size_ != batch_size_) {
        throw StateError("cannot merge accumulators with different batch sizes");
    }
    if (other.cur_train_.count() != 0) {
        throw StateError("cannot merge an accumulator with a partial batch");
    }
    all_train_.merge(other.all_train_);
    all_test_.merge(other.all_test_);
    batch_train_var_.insert(batch_train_var_.end(), other.batch_train_var_.begin(),
                            other.batch_train_var_.end());
    batch_test_var_.insert(batch_test_var_.end(), other.batch_test_var_.begin(),
                           other.batch_test_var_.end());
    batch_ratio_.insert(batch_ratio_.end(), other.batch_ratio_.begin(),
                        other.batch_ratio_.end());
}

McVarianceShift ShiftAccumulator::estimates() const {
    if (batch_train_var_.empty()) {
        throw StateError("no complete batches accumulated");
    }
    const std::size_t n = batch_train_var_.size() * batch_size_;
    McVarianceShift out;
    out.train = batch_means_estimate(all_train_.variance_unbiased(), batch_train_var_, n);
    out.test = batch_means_estimate(all_test_.variance_unbiased(), batch_test_var_, n);
    out.ratio = batch_means_estimate(
        all_test_.variance_unbiased() / all_train_.variance_unbiased(), batch_ratio_, n);
    return out;
}

McVarianceShift mc_case_a(const ShiftScenario& s, std::size_t n, RngStream& rng) {
    s.validate();
    const std::size_t batch = checked_batch_size(n);
    ShiftAccumulator acc(batch);
    const double sd = std::sqrt(s.input_variance);
    const double inv_p = 1.0 / s.retain_ratio;
    for (std::size_t i = 0; i < batch * kBatches; ++i) {
        const double x = s.input_mean + sd * rng.normal();
        const double mask = rng.bernoulli(s.retain_ratio) ? 1.0 : 0.0;
        acc.add_pair(mask * x * inv_p, x);
    }
    return acc.estimates();
}

McVarianceShift mc_case_b(const ShiftScenario& s, std::span<const double> weights,
                          std::size_t n, RngStream& rng) {
    s.validate();
    if (weights.size() != s.width) {
        throw ShapeError("weight count does not match scenario width");
    }
    bool all_zero = true;
    for (double w : weights) {
        if (w != 0.0) all_zero = false;
    }
    if (all_zero) {
        throw DomainError("all-zero weight vector gives zero train variance");
    }
    const std::size_t batch = checked_batch_size(n);
    ShiftAccumulator acc(batch);
    EquicorrelatedGaussian gen(s.input_mean, s.input_variance, s.input_correlation,
                               s.width);
    std::vector<double> x(s.width);
    const double inv_p = 1.0 / s.retain_ratio;
    for (std::size_t i = 0; i < batch * kBatches; ++i) {
        gen.sample(rng, x);
        double train = 0.0, test = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            test += weights[k] * x[k];
            if (rng.bernoulli(s.retain_ratio)) {
                train += weights[k] * x[k] * inv_p;
            }
        }
        acc.add_pair(train, test);
    }
    return acc.estimates();
}

McEstimate mc_uout(double variance, double beta, std::size_t n, RngStream& rng) {
    if (!(variance > 0.0)) {
        throw DomainError("input variance must be positive");
    }
    if (!(beta >= 0.0) || beta > 1.0) {
        throw DomainError("noise half-width must lie in [0, 1]");
    }
    const std::size_t batch = checked_batch_size(n);
    ShiftAccumulator acc(batch);
    const double sd = std::sqrt(variance);
    for (std::size_t i = 0; i < batch * kBatches; ++i) {
        const double x = sd * rng.normal();
        const double r = beta == 0.0 ? 0.0 : beta * (2.0 * rng.uniform() - 1.0);
        acc.add_pair(x * (1.0 + r), x);
    }
    // The quantity of interest is test variance over train variance.
    return acc.estimates().ratio;
}

std::vector<double> weights_for_alignment(std::size_t d, double cos2) {
    if (d == 0) {
        throw DomainError("width must be at least 1");
    }
    if (!(cos2 >= 0.0) || cos2 > 1.0) {
        throw DomainError("squared alignment must lie in [0, 1]");
    }
    if (d == 1) {
        if (cos2 != 1.0) {
            throw DomainError("width 1 admits only perfect alignment");
        }
        return {1.0};
    }
    const double along = std::sqrt(cos2 / static_cast<double>(d));
    const double across = std::sqrt((1.0 - cos2) / 2.0);
    std::vector<double> w(d, along);
    w[0] += across;
    w[1] -= across;
    return w;
}

std::vector<SweepScenario> default_scenario_grid() {
    std::vector<SweepScenario> grid;
    int idx = 1;
    for (double p : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        for (auto [c, v] : {std::pair{0.0, 1.0}, {1.0, 1.0}, {2.0, 0.5}}) {
            SweepScenario s;
            s.id = "a" + format_u64(static_cast<std::uint64_t>(idx++));
            s.kind = ScenarioKind::CaseA;
            s.scenario.input_mean = c;
            s.scenario.input_variance = v;
            s.scenario.retain_ratio = p;
            grid.push_back(std::move(s));
        }
    }
    idx = 1;
    for (std::size_t d : {std::size_t{1}, std::size_t{4}, std::size_t{16},
                          std::size_t{64}, std::size_t{256}}) {
        for (double rho : {0.0, 0.1, 0.5}) {
            SweepScenario s;
            s.id = "b" + format_u64(static_cast<std::uint64_t>(idx++));
            s.kind = ScenarioKind::CaseB;
            s.scenario.retain_ratio = 0.5;
            s.scenario.width = d;
            s.scenario.input_correlation = rho;
            s.scenario.cos2_alignment = 1.0;
            grid.push_back(std::move(s));
        }
    }
    idx = 1;
    for (double beta : {0.0, 0.1, 0.5, 1.0}) {
        SweepScenario s;
        s.id = "u" + format_u64(static_cast<std::uint64_t>(idx++));
        s.kind = ScenarioKind::Uout;
        s.scenario.uout_halfwidth = beta;
        grid.push_back(std::move(s));
    }
    return grid;
}

std::vector<SweepRow> mc_grid_sweep(std::span<const SweepScenario> scenarios,
                                    std::size_t n, RngStream& rng) {
    if (scenarios.empty()) {
        throw DomainError("scenario list must be non-empty");
    }
    std::vector<SweepRow> rows;
    rows.reserve(scenarios.size());
    for (const SweepScenario& spec : scenarios) {
        SweepRow row;
        row.spec = spec;
        RngStream row_rng(rng.next_u64(), static_cast<std::uint64_t>(rows.size()));
        try {
            switch (spec.kind) {
                case ScenarioKind::CaseA: {
                    row.analytic = shift_ratio_case_a(spec.scenario).ratio;
                    row.mc = mc_case_a(spec.scenario, n, row_rng).ratio;
                    break;
                }
                case ScenarioKind::CaseB: {
                    row.analytic = shift_ratio_case_b(spec.scenario).ratio;
                    std::vector<double> w = weights_for_alignment(
                        spec.scenario.width, spec.scenario.cos2_alignment);
                    row.mc = mc_case_b(spec.scenario, w, n, row_rng).ratio;
                    break;
                }
                case ScenarioKind::Uout: {
                    row.analytic = uout_shift_ratio(spec.scenario.uout_halfwidth);
                    row.mc = mc_uout(spec.scenario.input_variance,
                                     spec.scenario.uout_halfwidth, n, row_rng);
                    break;
                }
            }
            const double diff = row.mc.value - row.analytic;
            if (row.mc.stderr_value > 0.0) {
                row.z = diff / row.mc.stderr_value;
            } else if (diff == 0.0) {
                row.z = 0.0;
            } else {
                row.failed = true;
                row.error = "zero spread with nonzero deviation";
            }
        } catch (const Error& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

McVarianceShift mc_case_a_partitioned(const ShiftScenario& s, std::size_t n,
                                      std::uint64_t seed, unsigned workers) {
    s.validate();
    if (workers == 0) {
        throw DomainError("need at least one worker");
    }
    const std::size_t per_worker = n / workers;
    const std::size_t batch = checked_batch_size(per_worker);
    auto run = [&s, batch, seed](unsigned worker) {
        RngStream rng(seed, 1000 + worker);
        ShiftAccumulator acc(batch);
        const double sd = std::sqrt(s.input_variance);
        const double inv_p = 1.0 / s.retain_ratio;
        for (std::size_t i = 0; i < batch * kBatches; ++i) {
            const double x = s.input_mean + sd * rng.normal();
            const double mask = rng.bernoulli(s.retain_ratio) ? 1.0 : 0.0;
            acc.add_pair(mask * x * inv_p, x);
        }
        return acc;
    };
    std::vector<std::future<ShiftAccumulator>> futures;
    for (unsigned wkr = 1; wkr < workers; ++wkr) {
        futures.push_back(std::async(std::launch::async, run, wkr));
    }
    ShiftAccumulator total = run(0);
    for (auto& f : futures) total.merge(f.get());
    return total.estimates();
}

}  // namespace vshift
