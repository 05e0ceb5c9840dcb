#pragma once

#include <stdexcept>
#include <string>

namespace polyseg {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  ok = 0,
  usage = 2,
  data = 3,
  numeric = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

// Bad flags, impossible hyperparameters.
class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::usage; }
};

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Malformed input files, missing files, invariant violations in data.
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class UnsupportedModeError : public DataError {
 public:
  using DataError::DataError;
};

// Internal numeric consistency checks (cost drift, non-finite objectives).
class NumericError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numeric; }
};

}  // namespace polyseg
