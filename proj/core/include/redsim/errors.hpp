#pragma once

#include <stdexcept>
#include <string>

namespace redsim {

/// Bad parameters or configuration (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Load at or beyond the stability boundary where a formula needs rho < 1.
class UnstableLoadError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A formula needs a finite second moment and the distribution does not have one.
class HeavyTailError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Too little data for the requested estimator.
class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The experiment cannot produce a result (maps to CLI exit code 3).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace redsim
