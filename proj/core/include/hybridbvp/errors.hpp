#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hybridbvp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Evaluation left the domain of a function (sqrt of a negative, 1/0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression or configuration text. `offset` is a byte offset
/// into the source when the error is positional.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

/// An iteration hit its budget or stalled. Carries the residual history so
/// callers can diagnose the failure.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> residual_trace)
      : Error(what), trace_(std::move(residual_trace)) {}

  const std::vector<double>& residual_trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// A set that a hypothesis requires to be invariant was left by an iterate,
/// or an a-posteriori bound implied by that hypothesis failed.
class InvarianceViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace hybridbvp
