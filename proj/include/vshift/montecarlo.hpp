#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vshift/analytic.hpp"
#include "vshift/moments.hpp"
#include "vshift/rng.hpp"

namespace vshift {

struct McEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
    std::size_t n_samples = 0;
};

struct McVarianceShift {
    McEstimate train;
    McEstimate test;
    McEstimate ratio;
};

/// Paired train/test variance accumulator with batch-means standard errors.
/// Samples are split into contiguous batches; per-batch variances and ratios
/// provide the spread estimates, full-sample moments provide the values.
/// Accumulators with equal batch sizes merge, so sample generation can be
/// partitioned across workers with distinct RNG streams.
class ShiftAccumulator {
public:
    explicit ShiftAccumulator(std::size_t batch_size);

    void add_pair(double train_value, double test_value);
    void merge(const ShiftAccumulator& other);

    std::size_t complete_batches() const { return batch_train_var_.size(); }
    std::size_t batch_size() const { return batch_size_; }

    /// Estimates over all complete batches; partial tail samples are ignored.
    McVarianceShift estimates() const;

private:
    void close_batch();

    std::size_t batch_size_;
    StreamingMoments cur_train_, cur_test_;
    StreamingMoments all_train_, all_test_;
    std::vector<double> batch_train_var_, batch_test_var_, batch_ratio_;
};

/// Monte Carlo check of the single-unit dropout variance shift. Train values
/// are mask-scaled copies of the same draws the test values use.
McVarianceShift mc_case_a(const ShiftScenario& s, std::size_t n, RngStream& rng);

/// Monte Carlo check of the weighted-sum variance shift with equicorrelated
/// inputs and a fresh, independent mask per coordinate per sample.
McVarianceShift mc_case_b(const ShiftScenario& s, std::span<const double> weights,
                          std::size_t n, RngStream& rng);

/// Monte Carlo check of the multiplicative uniform-noise shift at zero mean.
McEstimate mc_uout(double variance, double beta, std::size_t n, RngStream& rng);

/// Unit-norm weight vector whose squared alignment with the all-ones
/// direction equals cos2 exactly. Widths of 1 admit only cos2 = 1.
std::vector<double> weights_for_alignment(std::size_t d, double cos2);

enum class ScenarioKind { CaseA, CaseB, Uout };

struct SweepScenario {
    std::string id;
    ScenarioKind kind = ScenarioKind::CaseA;
    ShiftScenario scenario;
};

struct SweepRow {
    SweepScenario spec;
    double analytic = 0.0;
    McEstimate mc;
    double z = 0.0;
    bool failed = false;
    std::string error;
};

/// The stock scenario grid: retain ratios crossed with input moments for the
/// single-unit case, widths crossed with correlations for the weighted-sum
/// case, and the uniform-noise half-widths.
std::vector<SweepScenario> default_scenario_grid();

/// One row per scenario with z = (mc - analytic) / stderr. Per-scenario
/// failures are recorded in the row and do not abort the sweep.
std::vector<SweepRow> mc_grid_sweep(std::span<const SweepScenario> scenarios,
                                    std::size_t n, RngStream& rng);

/// Case-a estimate computed by `workers` partitions with distinct stream ids,
/// merged into one accumulator. Matches the single-stream run within noise.
McVarianceShift mc_case_a_partitioned(const ShiftScenario& s, std::size_t n,
                                      std::uint64_t seed, unsigned workers);

}  // namespace vshift
