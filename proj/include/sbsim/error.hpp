#pragma once

#include <stdexcept>
#include <string>

namespace sbsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad configuration value, precondition violation, shape mismatch.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operation only defined in a particular spatial dimension.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Non-finite values appeared while time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(std::string diagnostic, double value, double time)
      : Error("numerical blow-up: " + diagnostic + " = " + std::to_string(value) +
              " at t = " + std::to_string(time)),
        diagnostic_(std::move(diagnostic)),
        value_(value),
        time_(time) {}

  const std::string& diagnostic() const noexcept { return diagnostic_; }
  double value() const noexcept { return value_; }
  double time() const noexcept { return time_; }

 private:
  std::string diagnostic_;
  double value_;
  double time_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbsim
