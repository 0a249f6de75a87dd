#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace datawords {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, or 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a data invariant (duplicate ids, bad spans, ...).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid parameters or configuration files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A model bundle written by an unknown format version.
class UnsupportedVersionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Invalid argument values handed to a numeric routine.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numeric record whose variable has neither explicit cuts nor training statistics.
class UnresolvedVariableError : public InputError {
 public:
  using InputError::InputError;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace datawords
