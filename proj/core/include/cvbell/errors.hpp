#pragma once

#include <stdexcept>
#include <string>

namespace cvbell {

/// Invalid argument supplied by the caller (non-finite values, ranges out of bounds).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for failures where a numerical tolerance could not be met.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The number-basis cutoff required by a state exceeds the configured hard limit.
class TruncationError : public NumericalError {
public:
    TruncationError(const std::string& what, double r0) : NumericalError(what), r0_(r0) {}
    double r0() const noexcept { return r0_; }

private:
    double r0_;
};

/// Probability lost to local-oscillator truncation is above tolerance.
class LeakageError : public NumericalError {
public:
    LeakageError(const std::string& what, int cutoff) : NumericalError(what), cutoff_(cutoff) {}
    /// The cutoff that was in effect; raise it to reduce leakage.
    int cutoff() const noexcept { return cutoff_; }

private:
    int cutoff_;
};

/// Rejection sampler stalled (acceptance far below its analytic floor).
class SamplerError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace cvbell
