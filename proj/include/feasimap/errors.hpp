#pragma once

#include <stdexcept>
#include <string>

namespace feasimap {

/// Caller handed us something that violates a precondition.
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation could not be completed in floating point (e.g. a covariance
/// matrix that stays indefinite after maximum jitter escalation).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The cap on expensive constraint evaluations was hit.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace feasimap
