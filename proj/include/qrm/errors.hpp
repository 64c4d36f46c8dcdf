#pragma once

#include <stdexcept>
#include <string>

namespace qrm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InvalidParameter : Error {
    using Error::Error;
};

// Fock-space truncation too small for the requested state or evolution.
struct TruncationOverflow : Error {
    using Error::Error;
};

// Adaptive step controller underflowed the minimum step size.
struct StepFailure : Error {
    using Error::Error;
};

struct GapTooSmall : Error {
    using Error::Error;
};

// Semiclassical moment system is not closed for the requested relaxation kind.
struct ClosureViolation : Error {
    using Error::Error;
};

struct NonpositiveVariance : Error {
    using Error::Error;
};

// Envelope maximum fell in the final 5% of the horizon.
struct PeakAtBoundary : Error {
    using Error::Error;
};

struct NonpositiveData : Error {
    using Error::Error;
};

struct DegenerateAbscissa : Error {
    using Error::Error;
};

struct ConfigError : Error {
    ConfigError(const std::string& msg, std::string key_, int line_ = 0)
        : Error(msg), key(std::move(key_)), line(line_) {}
    std::string key;
    int line;
};

} // namespace qrm
