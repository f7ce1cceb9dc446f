#pragma once

#include <stdexcept>
#include <string>

namespace ctmc {

/// Base of everything thrown by this library. `kind()` is a stable
/// machine-readable tag used by the CLI error reports.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "internal"; }
};

// ---- input-side failures (CLI exit code 1) --------------------------------

class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input"; }
};

/// Dimension mismatches: non-square input, ragged rows, incompatible products.
class ShapeError : public InputError {
 public:
  using InputError::InputError;
  const char* kind() const noexcept override { return "shape"; }
};

/// Malformed matrix files. Carries 1-based line/column when known.
class ParseError : public InputError {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : InputError(what), line(line), column(column) {}
  const char* kind() const noexcept override { return "parse"; }

  std::size_t line;
  std::size_t column;
};

/// Input matrix is not a right intensity matrix (negative rate, bad row sum).
class ValidationError : public InputError {
 public:
  using InputError::InputError;
  const char* kind() const noexcept override { return "validation"; }
};

/// Scalar argument outside the supported domain (negative time, z <= 0, ...).
class DomainError : public InputError {
 public:
  using InputError::InputError;
  const char* kind() const noexcept override { return "domain"; }
};

// ---- numerical failures (CLI exit code 2) ---------------------------------

class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "singular-matrix"; }
};

/// No column replacement yields a solvable system in left_null_vector.
class DegenerateNullSpaceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "degenerate-null-space"; }
};

/// Horizon doubling exceeded its cap without meeting the tolerance.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "convergence"; }
};

}  // namespace ctmc
