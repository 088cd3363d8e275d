#include "vshift/moments.hpp"

#include "vshift/errors.hpp"

namespace vshift {

void StreamingMoments::merge(const StreamingMoments& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double delta = other.mean_ - mean_;
    const std::size_t total = count_ + other.count_;
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    mean_ += delta * nb / static_cast<double>(total);
    m2_ += other.m2_ + delta * delta * na * nb / static_cast<double>(total);
    count_ = total;
}

double StreamingMoments::mean() const {
    if (count_ == 0) throw StateError("mean of empty accumulator");
    return mean_;
}

double StreamingMoments::variance_biased() const {
    if (count_ < 1) throw StateError("biased variance needs at least one sample");
    return m2_ / static_cast<double>(count_);
}

double StreamingMoments::variance_unbiased() const {
    if (count_ < 2) throw StateError("unbiased variance needs at least two samples");
    return m2_ / static_cast<double>(count_ - 1);
}

}  // namespace vshift
