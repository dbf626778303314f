#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace innervar {

enum class ErrorCode {
  NonInvertible = 1,
  UnsupportedBoundary,
  TubeTooNarrow,
  StiffTail,
  EpsilonTooLarge,
  DimensionMismatch,
  DegenerateReference,
  ConfigError,
  NumericalFailure,
};

const char* error_code_name(ErrorCode code);
std::optional<ErrorCode> parse_error_code(const std::string& name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace innervar
