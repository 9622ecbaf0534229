#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsp {

enum class ErrorCode {
  PeriodTooShort,
  PeriodNotDivisible,
  OddPeriod,
  DegenerateParameter,
  DomainError,
  EmptyEvenPart,
  SymbolZeroOnCircle,
  NoConvergence,
  FitFailed,
  ShapeMismatch,
  InvalidMask,
  BadParams,
  Io,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PeriodTooShort: return "period too short";
    case ErrorCode::PeriodNotDivisible: return "period not divisible";
    case ErrorCode::OddPeriod: return "odd period";
    case ErrorCode::DegenerateParameter: return "degenerate parameter";
    case ErrorCode::DomainError: return "domain error";
    case ErrorCode::EmptyEvenPart: return "empty even part";
    case ErrorCode::SymbolZeroOnCircle: return "symbol zero on unit circle";
    case ErrorCode::NoConvergence: return "no convergence";
    case ErrorCode::FitFailed: return "fit failed";
    case ErrorCode::ShapeMismatch: return "shape mismatch";
    case ErrorCode::InvalidMask: return "invalid mask";
    case ErrorCode::BadParams: return "bad parameters";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Parse: return "parse error";
  }
  return "unknown";
}

/// Exception carrying a machine-readable code. The message always starts with
/// the code's text so callers can match on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// I/O and parse failures, as opposed to violated numerical preconditions.
  bool is_io() const noexcept {
    return code_ == ErrorCode::Io || code_ == ErrorCode::Parse;
  }

 private:
  ErrorCode code_;
};

}  // namespace nsp
