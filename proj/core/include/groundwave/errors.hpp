#pragma once

#include <stdexcept>
#include <string>

namespace groundwave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scene parameters violate a geometric invariant (heights, separation, tilt).
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the documented domain of an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The protocol state machine was handed a state or event it cannot interpret,
/// e.g. a beam reference that is not part of the codebook.
class ProtocolFault : public Error {
 public:
  using Error::Error;
};

/// A scenario cannot start: missing calibration, inconsistent codebooks, bad
/// timing parameters.
class ScenarioFault : public Error {
 public:
  using Error::Error;
};

/// Malformed structured-text input (configs, codebooks, event traces).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace groundwave
