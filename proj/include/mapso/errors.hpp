#pragma once

#include <stdexcept>
#include <string>

namespace mapso {

/// Bad caller input: out-of-range targets, malformed plans, unknown names.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that come from the numbers rather than the caller.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A formula hit a zero denominator or an otherwise undefined point.
class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The requested quantity only exists for order-2 stable coefficients.
class StabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An iterative method ran out of iterations without settling.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A closed form failed its own substitution check.
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A schedule produced coefficients that violate the schedule contract.
class ScheduleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mapso
