#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace toprec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual or JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A spectral curve or model failed validation. `invariant()` names the
/// violated invariant so callers can report it verbatim.
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& detail)
      : Error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// A computation could not be carried out (unsupported case, insufficient
/// precision that could not be extended, degenerate data).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace toprec
