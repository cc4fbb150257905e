#pragma once

#include <stdexcept>
#include <string>

namespace kinetics {

// Two families, mapped to distinct CLI exit codes: bad input (1) and
// numerical failure during a run (2).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonUnitNormal : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvalidRestitution : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SingularRestitution : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class UnderResolved : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SpeedExceedsLambda : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ChartSingularity : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class MajorantExceeded : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : InvalidInput(what), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class ValidationError : public InvalidInput {
 public:
  ValidationError(const std::string& what, std::string key)
      : InvalidInput(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace kinetics
