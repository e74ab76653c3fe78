#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ermakov {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in an expression string.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, const std::string& message)
      : Error("parse error at offset " + std::to_string(offset) + ": " + message +
              (expected.empty() ? std::string() : " (expected " + expected + ")")),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownFunctionError : public ParseError {
 public:
  UnknownFunctionError(std::size_t offset, const std::string& name)
      : ParseError(offset, "a known function", "unknown function '" + name + "'"),
        name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(const std::string& name)
      : Error("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Division by zero, ln of a non-positive value, sqrt of a negative value, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A state sits below one of the configured floors (r_min, v_min, u_min, ...).
class SingularStateError : public Error {
 public:
  SingularStateError(std::string floor_name, const std::string& message)
      : Error("singular state (" + floor_name + "): " + message),
        floor_(std::move(floor_name)) {}
  const std::string& floor() const noexcept { return floor_; }

 private:
  std::string floor_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Integration stopped; carries the last accepted state.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, double last_time,
                   std::array<double, 4> last_state)
      : Error(message), last_time_(last_time), last_state_(last_state) {}

  double last_time() const noexcept { return last_time_; }
  const std::array<double, 4>& last_state() const noexcept { return last_state_; }

 private:
  double last_time_;
  std::array<double, 4> last_state_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ermakov
