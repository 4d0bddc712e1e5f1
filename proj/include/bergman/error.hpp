#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bergman {

enum class ErrorCode {
  NonIntegrable,
  ZeroPoint,
  InsufficientResolution,
  UndefinedRegion,
  CapTooClose,
  Overflow,
  NanIntegrand,
  NestedBudget,
  Unsupported,
  UnsupportedRegime,
  BadExponents,
  TruncationInsufficient,
  ConfigInvalid,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; the code is stable and
// is what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonIntegrable: return "NON_INTEGRABLE";
    case ErrorCode::ZeroPoint: return "ZERO_POINT";
    case ErrorCode::InsufficientResolution: return "INSUFFICIENT_RESOLUTION";
    case ErrorCode::UndefinedRegion: return "UNDEFINED_REGION";
    case ErrorCode::CapTooClose: return "CAP_TOO_CLOSE";
    case ErrorCode::Overflow: return "OVERFLOW";
    case ErrorCode::NanIntegrand: return "NAN_INTEGRAND";
    case ErrorCode::NestedBudget: return "NESTED_BUDGET";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::UnsupportedRegime: return "UNSUPPORTED_REGIME";
    case ErrorCode::BadExponents: return "BAD_EXPONENTS";
    case ErrorCode::TruncationInsufficient: return "TRUNCATION_INSUFFICIENT";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::InvariantViolation: return "INVARIANT_VIOLATION";
  }
  return "UNKNOWN";
}

}  // namespace bergman
