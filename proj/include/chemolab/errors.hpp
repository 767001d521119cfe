#pragma once

#include <stdexcept>
#include <string>

namespace chemo {

/// Invalid configuration value (bad grid size, parameter out of range, ...).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A computation could not be carried out on the given data
/// (non-finite field value, log of a non-positive argument, ...).
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The time stepper produced an invalid state (lost positivity, singular
/// implicit solve). Carries the time at which the scheme failed.
struct SchemeFailure : std::runtime_error {
    SchemeFailure(double t_fail, const std::string& what)
        : std::runtime_error(what), t(t_fail) {}
    double t;
};

} // namespace chemo
