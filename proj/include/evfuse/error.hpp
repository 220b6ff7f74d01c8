#pragma once

#include <stdexcept>
#include <string>

namespace evfuse {

// Exit codes of the command line tool. Library errors carry the code they map to.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kData = 2,
  kNumerical = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Argument outside the mathematical domain of a function (log_gamma(-1), negative evidence).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Vector lengths or class counts that do not line up.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Probability vector that does not lie on the unit simplex.
class SimplexError : public Error {
 public:
  explicit SimplexError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Malformed input files, bad labels, inconsistent datasets.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Bad configuration keys or command line usage.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

// Non-finite loss or other numerical breakdown during training.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ExitCode::kNumerical, what) {}
};

}  // namespace evfuse
