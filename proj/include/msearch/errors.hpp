#pragma once

#include <stdexcept>
#include <string>

namespace msearch {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The requested size exceeds the configured memory or time budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The requested tolerance cannot be met at the available precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// A series constant was requested for a toll whose series diverges.
class DivergentSeriesError : public Error {
 public:
  using Error::Error;
};

/// Operands use incompatible arithmetic modes, or a mode cannot represent a
/// toll exactly.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (no convergence, cancellation detected).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace msearch
