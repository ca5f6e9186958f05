#pragma once

#include <stdexcept>
#include <string>

namespace classo {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Incompatible matrix/vector dimensions.
class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// The scale estimate collapsed below the configured floor, or the scale
/// equation has no positive solution (perfect fit / overfit regime).
class DegenerateScale : public Error {
 public:
  explicit DegenerateScale(const std::string& msg) : Error(msg) {}
};

/// No penalty value yields the requested number of nonzero coefficients
/// (the active-set size can jump by more than one between breakpoints).
class NoSuchSparsity : public Error {
 public:
  explicit NoSuchSparsity(const std::string& msg) : Error(msg) {}
};

/// A caller-supplied argument violates a documented precondition.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// An input file could not be parsed.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace classo
