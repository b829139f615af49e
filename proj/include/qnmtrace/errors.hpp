#pragma once

#include <stdexcept>
#include <string>

namespace qnmtrace {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An iterative method ran out of iterations or step size.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class StepSizeUnderflow : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

/// Division by a numerically vanishing Wronskian.
class ResonanceHitError : public Error {
 public:
  using Error::Error;
};

class BranchTrackingError : public Error {
 public:
  using Error::Error;
};

class BoundaryZeroError : public Error {
 public:
  using Error::Error;
};

class MaxDepthError : public Error {
 public:
  using Error::Error;
};

class PropagationWindowError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace qnmtrace
