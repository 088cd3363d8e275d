#pragma once

#include <cstddef>

namespace vshift {

/// Single-pass mean/variance accumulator (Welford recurrence).
///
/// Supports merging, so statistics can be accumulated per worker or per batch
/// and combined at the end; merging equals accumulating the concatenated
/// samples up to floating-point rounding.
class StreamingMoments {
public:
    void add(double x) {
        count_ += 1;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    void merge(const StreamingMoments& other);

    std::size_t count() const { return count_; }
    double mean() const;

    /// m2 / count; requires count >= 1.
    double variance_biased() const;

    /// m2 / (count - 1); requires count >= 2.
    double variance_unbiased() const;

    double sum_squared_deviations() const { return m2_; }

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace vshift
