#pragma once

#include <stdexcept>
#include <string>

namespace graphon {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (a point outside [0,1], a malformed matrix, a violated precondition).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The request is well formed but the library declines to run it,
/// e.g. an exhaustive search above its size guard.
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// Malformed input file or configuration.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphon
