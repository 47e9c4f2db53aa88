#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hoij {

// Base for every error raised by the library. The CLI maps these to exit
// code 1; usage problems are reported separately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Unknown model id or incompatible dimensions.
class ModelError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity appeared while evaluating an estimating equation or one of
// its derivatives.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Requested derivative or expansion order is outside the supported range.
class OrderError : public Error {
 public:
  using Error::Error;
};

// A linear system could not be solved reliably.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Root finding failed. Carries the last iterate for diagnostics.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> iterate)
      : Error(what), iterate_(std::move(iterate)) {}

  const std::vector<double>& iterate() const { return iterate_; }

 private:
  std::vector<double> iterate_;
};

// The bound machinery was asked for something its preconditions forbid
// (e.g. derivative bounds when the set-complexity condition fails).
class ConditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace hoij
