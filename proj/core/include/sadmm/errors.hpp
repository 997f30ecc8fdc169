#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sadmm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or operator dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Dataset content violates a model requirement (e.g. non-binary labels).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Power iteration did not reach the requested tolerance. Carries the best
/// eigenvalue estimate seen so far.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// A solver iterate became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t iteration, const std::string& what)
      : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::int64_t iteration() const noexcept { return iteration_; }

 private:
  std::int64_t iteration_;
};

/// A diagnostic quantity is undefined for this problem (lambda_min(AA^T) = 0).
class UndefinedDiagnosticError : public Error {
 public:
  using Error::Error;
};

/// The estimator backend has no proven variance-reduction constants.
class UncertifiedConstantsError : public Error {
 public:
  using Error::Error;
};

}  // namespace sadmm
