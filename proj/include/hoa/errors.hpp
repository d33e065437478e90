#pragma once

#include <stdexcept>
#include <string>

namespace hoa {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. log_gamma(0)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A physical or structural constraint on state parameters or criterion
/// orders is violated (M <= l, L below its lower bound, m > l, ...).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// A criterion ratio has a zero denominator (vacuum and low-photon states).
class UndefinedCriterionError : public Error {
 public:
  using Error::Error;
};

/// Convergence or truncation failure; results would be unreliable.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A hypergeometric denominator parameter hit zero before the series terminated.
class DegenerateParameterError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hoa
