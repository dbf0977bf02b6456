#pragma once

#include <stdexcept>
#include <string>

namespace mkv {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct PointNotOnBoundary : Error {
    using Error::Error;
};

struct BeadOutsideDomain : Error {
    using Error::Error;
};

struct StepRejected : Error {
    using Error::Error;
};

struct StabilityViolation : Error {
    using Error::Error;
};

struct LinearSolveFailure : Error {
    using Error::Error;
};

struct OutsideDomain : Error {
    using Error::Error;
};

struct GridTooCoarse : Error {
    using Error::Error;
};

struct GridMismatch : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ZeroDenominator : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace mkv
