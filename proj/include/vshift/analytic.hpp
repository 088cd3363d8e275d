#pragma once

#include <cstddef>
#include <span>

namespace vshift {

/// Parameter bundle for one variance-shift computation.
///
/// Fields a given formula does not use keep their defaults (width 1, zero
/// correlation, alignment 1, zero noise half-width).
struct ShiftScenario {
    double input_mean = 0.0;        // per-channel mean of the inputs
    double input_variance = 1.0;    // per-channel variance, must be > 0
    double retain_ratio = 1.0;      // dropout keep probability, in (0, 1]
    std::size_t width = 1;          // number of channels feeding the weighted sum
    double input_correlation = 0.0; // pairwise correlation of the inputs, in [0, 1]
    double cos2_alignment = 1.0;    // squared cosine between the weights and the all-ones vector
    double uout_halfwidth = 0.0;    // half-width of the multiplicative uniform noise, in [0, 1]

    /// Throws DomainError on any out-of-range field.
    void validate() const;
};

struct ShiftResult {
    double var_train = 0.0;
    double var_test = 0.0;
    double ratio = 0.0;  // var_test / var_train
};

/// Train-mode variance of one dropout-scaled unit: (1/p)(c^2 + v) - c^2.
double var_train_case_a(const ShiftScenario& s);

/// Test/train variance ratio when normalization directly follows dropout.
ShiftResult shift_ratio_case_a(const ShiftScenario& s);

/// Correlation of the masked-scaled inputs in terms of the raw input
/// correlation; the coefficient equals the case-a shift ratio.
double rho_ax_from_rho_x(const ShiftScenario& s);

/// Train-mode variance of a weighted sum of dropout-scaled inputs.
double var_train_case_b(const ShiftScenario& s, std::span<const double> weights);

/// Test-mode variance of the same weighted sum without dropout.
double var_test_case_b(const ShiftScenario& s, std::span<const double> weights);

/// Squared cosine between a weight vector and the all-ones vector:
/// (sum w)^2 / (d * sum w^2).
double cos_sq_theta(std::span<const double> weights);

/// Test/train variance ratio for the weighted-sum topology, expressed through
/// (width, alignment, correlation) alone. var_train/var_test are reported per
/// unit sum of squared weights; the ratio is weight-scale invariant.
ShiftResult shift_ratio_case_b(const ShiftScenario& s);

/// Test/train variance ratio of zero-mean multiplicative uniform noise
/// x(1 + r), r ~ U(-beta, beta): 3 / (3 + beta^2).
double uout_shift_ratio(double beta);

}  // namespace vshift
