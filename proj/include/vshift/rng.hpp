#pragma once

#include <cstdint>
#include <random>

namespace vshift {

/// Deterministic random stream, addressable by (seed, stream_id).
///
/// Identical (seed, stream_id) pairs reproduce the exact same sample
/// sequence; distinct stream_ids give statistically independent streams, so
/// workers and independent subsystems can draw concurrently without sharing
/// state. Distributions are implemented here rather than taken from
/// <random> so the sequence does not depend on the standard library build.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform();

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_open();

    /// Uniform on [lo, hi).
    double uniform_range(double lo, double hi);

    /// Standard normal (Marsaglia polar, pairs cached).
    double normal();

    /// true with probability p; requires p in [0, 1].
    bool bernoulli(double p);

    /// Uniform index in [0, n); requires n > 0.
    std::size_t index(std::size_t n);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace vshift
