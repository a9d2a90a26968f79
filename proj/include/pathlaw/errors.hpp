#pragma once

#include <stdexcept>
#include <string>

namespace pathlaw {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- path construction / evaluation --

struct EmptyPath : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct NonMonotoneTimes : Error {
  using Error::Error;
};

struct OutOfDomain : Error {
  using Error::Error;
};

/// Raised when an operation requires operands on a common time horizon.
struct HorizonMismatch : Error {
  using Error::Error;
};

// -- numerics --

/// Raised when a numeric routine cannot guarantee a stable result
/// (e.g. exponential scaling pushed past the double range).
struct NumericalRange : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

// -- sampling --

struct InvalidParams : Error {
  using Error::Error;
};

struct RejectionBudgetExceeded : Error {
  using Error::Error;
};

// -- statistics --

struct TooFewSamples : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

// -- scenarios / CLI --

struct UnknownScenario : Error {
  using Error::Error;
};

struct InvalidSelector : Error {
  using Error::Error;
};

}  // namespace pathlaw
