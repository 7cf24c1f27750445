#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anodiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (bad key, missing value, bad sizes).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numeric parameter outside its admissible range (e.g. alpha not in (0,1]).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operation invoked on an object that is not ready for it (e.g. empty history).
class StateError : public Error {
public:
    using Error::Error;
};

/// Evaluation at a singular point of a closed-form expression.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Requested combination of options that the solver does not implement.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double quantity, double limit)
        : Error(what), quantity_(quantity), limit_(limit) {}

    double quantity() const noexcept { return quantity_; }
    double limit() const noexcept { return limit_; }

private:
    double quantity_;
    double limit_;
};

/// A time step produced a non-finite value.
class BlowUpError : public Error {
public:
    explicit BlowUpError(std::size_t step)
        : Error("non-finite field value at step " + std::to_string(step)), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace anodiff
