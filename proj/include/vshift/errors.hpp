#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vshift {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A value fell outside the mathematically valid domain of an operation
/// (probability outside [0,1], non-positive variance, degenerate weights, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Tensor or batch extents do not match what an operation requires.
struct ShapeError : Error {
    using Error::Error;
};

/// An operation was called in a state it does not support
/// (backward without a cached forward, scan on an untrained network, ...).
struct StateError : Error {
    using Error::Error;
};

/// A configuration file or CLI argument set is invalid.
struct ConfigError : Error {
    using Error::Error;
};

/// Training produced a non-finite loss.
struct DivergenceError : Error {
    std::size_t epoch;
    DivergenceError(std::size_t epoch_, const std::string& msg) : Error(msg), epoch(epoch_) {}
};

}  // namespace vshift
