#pragma once

#include <stdexcept>
#include <string>

namespace earnshaw {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad schema, overlapping objects, out-of-range values.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside its domain (e.g. Drude model at zero
/// frequency, coincident translation origins).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Objects overlap, touch, or would after a displacement.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Requested multipole order exceeds what the special functions support.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference or statistical precision requirements cannot be met.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// I - N developed a non-positive eigenvalue: the multipole truncation is
/// too coarse for the geometry.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Iterative refinement ran out of budget. `partial_value` carries the last
/// estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double partial_value, double est_rel_error)
      : Error(what), partial_value_(partial_value), est_rel_error_(est_rel_error) {}

  double partial_value() const noexcept { return partial_value_; }
  double est_rel_error() const noexcept { return est_rel_error_; }

 private:
  double partial_value_;
  double est_rel_error_;
};

}  // namespace earnshaw
