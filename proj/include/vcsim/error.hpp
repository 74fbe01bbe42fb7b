#pragma once

#include <stdexcept>
#include <string>

namespace vcsim {

/// Process exit status classes used by the command-line tool.
enum class ExitCode : int {
  kSuccess = 0,
  kValidation = 1,
  kInvariant = 2,
  kIo = 3,
};

/// Base of every error raised by the library. `code()` is a short, stable
/// identifier (e.g. "forgetting_factor_out_of_range") that tests and tools can
/// match on; `exit_code()` maps it to the CLI status class.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string &message, ExitCode exit)
      : std::runtime_error(message), code_(std::move(code)), exit_(exit) {}

  const std::string &code() const noexcept { return code_; }
  ExitCode exit_code() const noexcept { return exit_; }

private:
  std::string code_;
  ExitCode exit_;
};

/// Scenario, demand table or parameter problems detected before a run.
class ConfigError : public Error {
public:
  ConfigError(std::string code, const std::string &message)
      : Error(std::move(code), message, ExitCode::kValidation) {}
};

/// A precondition of a domain operation was violated by caller input.
class ValidationError : public Error {
public:
  ValidationError(std::string code, const std::string &message)
      : Error(std::move(code), message, ExitCode::kValidation) {}
};

/// A runtime invariant broke; always a logic bug in the model or engine.
class InvariantViolation : public Error {
public:
  InvariantViolation(std::string code, const std::string &message)
      : Error(std::move(code), message, ExitCode::kInvariant) {}
};

class IoError : public Error {
public:
  IoError(std::string code, const std::string &message)
      : Error(std::move(code), message, ExitCode::kIo) {}
};

class ComparisonError : public Error {
public:
  explicit ComparisonError(const std::string &message)
      : Error("comparison_mismatch", message, ExitCode::kValidation) {}
};

} // namespace vcsim
