#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weibrec {

/// Malformed or out-of-domain input (bad parameters, non-positive values, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Data that admits no estimate, e.g. a record series with a single value.
class DegenerateData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base class for failures of the numerical machinery (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularInformation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientDraws : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The pivotal equation showed no sign change on the admissible bracket.
class BracketFailure : public NumericalError {
public:
    BracketFailure(const std::string& what, double g_low, double g_high)
        : NumericalError(what), g_low_(g_low), g_high_(g_high) {}

    double g_low() const noexcept { return g_low_; }
    double g_high() const noexcept { return g_high_; }

private:
    double g_low_;
    double g_high_;
};

/// Wraps a failure raised inside one Monte Carlo replicate.
class ReplicateFailure : public NumericalError {
public:
    ReplicateFailure(const std::string& what, std::size_t replicate)
        : NumericalError(what), replicate_(replicate) {}

    std::size_t replicate() const noexcept { return replicate_; }

private:
    std::size_t replicate_;
};

}  // namespace weibrec
