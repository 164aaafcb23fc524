#pragma once

#include <stdexcept>
#include <string>

namespace uvclt {

/// Configuration violates a correctness precondition: bad config file,
/// CFL violation, grid overflow with extrapolation disabled.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solve produced non-finite values or a strict runtime check failed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exact oracle would exceed its configured state or policy budget.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bandwidth search could not reach the requested sup-norm deviation.
class ApproximationError : public std::runtime_error {
public:
    ApproximationError(const std::string& what, double best)
        : std::runtime_error(what), best_deviation(best) {}
    double best_deviation;
};

}  // namespace uvclt
