#pragma once

#include <stdexcept>
#include <string>

namespace wageband {

/// Base of every solver exception. Carries a mutable context prefix so that
/// callers higher in the stack can annotate the stage that failed without
/// losing the dynamic type of the error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message)
      : std::runtime_error(message), message_(message) {}

  const char* what() const noexcept override { return message_.c_str(); }

  void add_context(const std::string& stage) { message_ = stage + ": " + message_; }

 private:
  std::string message_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NoSolutionError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class EmptyMarketError : public Error {
 public:
  using Error::Error;
};

class DegeneratePoolingError : public Error {
 public:
  using Error::Error;
};

class BandClassificationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Last accepted integrator state before a failure.
struct OdeState {
  double s = 0.0;
  double tau = 0.0;
  double mu = 0.0;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, OdeState last)
      : Error(message), last_(last) {}

  const OdeState& last_state() const noexcept { return last_; }

 private:
  OdeState last_;
};

class ToleranceError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

}  // namespace wageband
