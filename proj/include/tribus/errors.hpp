#pragma once

#include <stdexcept>
#include <string>

namespace tribus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (bad JSON, wrong value type, unreadable file).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a model invariant. `field()` names the
/// offending config path, e.g. `buses[1].port_id`.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the operation's domain (register out of range, joint
/// limit violation, non-positive latency, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No torque setting satisfies a port limit. Carries the load drawn at
/// zero torque so callers can report how far off the request is.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, double min_achievable_load)
      : Error(message), min_achievable_load_(min_achievable_load) {}

  double min_achievable_load() const noexcept { return min_achievable_load_; }

 private:
  double min_achievable_load_;
};

/// Requested item does not exist (unknown label, no detection, ...).
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Undamped IK step on a rank-deficient Jacobian.
class DegenerateChainError : public Error {
 public:
  using Error::Error;
};

}  // namespace tribus
