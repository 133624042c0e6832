#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gadi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A size argument is zero or otherwise unusable.
class InvalidDimension : public Error {
public:
  using Error::Error;
};

/// Operands have incompatible shapes.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A result would not fit in the index type.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// A parameter is outside its admissible range (alpha <= 0, omega >= 2, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// CG-type breakdown: a curvature term p^T A p was not positive.
class Breakdown : public Error {
public:
  using Error::Error;
};

/// A direct factorization met a zero pivot.
class SingularMatrix : public Error {
public:
  using Error::Error;
};

/// Malformed input file or stream.
class ParseError : public Error {
public:
  using Error::Error;
};

/// An iterative estimator stopped at its iteration cap.
class NotConverged : public Error {
public:
  using Error::Error;
};

/// A sub-solver failed inside an outer iteration; carries the outer step.
class SubSolveError : public Error {
public:
  SubSolveError(std::size_t outer_step, const std::string& what)
      : Error("outer step " + std::to_string(outer_step) + ": " + what),
        outer_step_(outer_step) {}
  std::size_t outer_step() const noexcept { return outer_step_; }

private:
  std::size_t outer_step_;
};

} // namespace gadi
