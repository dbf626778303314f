#include "innervar/errors.hpp"

namespace innervar {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::UnsupportedBoundary: return "UnsupportedBoundary";
    case ErrorCode::TubeTooNarrow: return "TubeTooNarrow";
    case ErrorCode::StiffTail: return "StiffTail";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateReference: return "DegenerateReference";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

std::optional<ErrorCode> parse_error_code(const std::string& name) {
  for (int c = static_cast<int>(ErrorCode::NonInvertible); c <= static_cast<int>(ErrorCode::NumericalFailure); ++c)
    if (name == error_code_name(static_cast<ErrorCode>(c))) return static_cast<ErrorCode>(c);
  return std::nullopt;
}

}  // namespace innervar
