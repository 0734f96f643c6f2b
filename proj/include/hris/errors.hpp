#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hris {

/// Input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A recovered beamformer has (numerically) zero gain toward its user.
class DegenerateBeamformer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix expected to be PSD has an eigenvalue below the allowed slack.
class NotPsd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class RangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hris
