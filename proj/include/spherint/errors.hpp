#pragma once

#include <stdexcept>
#include <string>

namespace spherint {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (pole region,
// wrong branch, nonpositive variance factor, ...).
struct DomainError : Error {
  using Error::Error;
};

// A root finder or iterative scheme failed to converge. On the stated
// branches this signals a numerical bug, not a property of the input.
struct ConvergenceError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

// Real part of a quadratic form is not positive definite.
struct PositivityError : Error {
  using Error::Error;
};

struct DegreeOverflow : Error {
  using Error::Error;
};

struct GapError : Error {
  using Error::Error;
};

struct OverflowError : Error {
  using Error::Error;
};

struct DisagreementError : Error {
  using Error::Error;
};

struct DegenerateInput : Error {
  using Error::Error;
};

struct IllConditioned : Error {
  using Error::Error;
};

struct UnknownLaw : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace spherint
