#pragma once

#include <stdexcept>
#include <string>

namespace hypolib {

// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point or function does not belong to the expected domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A function would have an empty hypograph (all values -inf).
class EmptyHypographError : public Error {
 public:
  using Error::Error;
};

// An operation's documented precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A constraint set has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Malformed input document (CSV/JSON); message carries line/field details.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace hypolib
