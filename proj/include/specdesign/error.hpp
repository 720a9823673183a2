#pragma once

#include <stdexcept>
#include <string>

namespace specdesign {

enum class ErrorCode {
  DimensionZero,
  DimensionMismatch,
  LengthMismatch,
  NotPSD,
  UnknownCriterion,
  InfeasibleBudget,
  RankBudgetExceeded,
  TraceBudgetExceeded,
  BadRange,
  BudgetTooSmall,
  GridMismatch,
  InvalidArgument,
  Parse,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionZero: return "DimensionZero";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::UnknownCriterion: return "UnknownCriterion";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::RankBudgetExceeded: return "RankBudgetExceeded";
    case ErrorCode::TraceBudgetExceeded: return "TraceBudgetExceeded";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace specdesign
