#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pmw {

enum class ErrorCode {
  RankDeficient,
  NotPositiveDefinite,
  DimensionMismatch,
  Singular,
  ModelMismatch,
  NoSolution,
  InvalidVirtualDistribution,
  ZeroMassElement,
  Unreachable,
  ZeroTorque,
  EmptyIntersection,
  InvalidArgument,
  ParseError,
  StaticallyIndeterminate,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<int> leg = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), leg_(leg) {}

  ErrorCode code() const noexcept { return code_; }
  /// Zero-based leg index for kinematic failures.
  std::optional<int> leg() const noexcept { return leg_; }

 private:
  ErrorCode code_;
  std::optional<int> leg_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::InvalidVirtualDistribution: return "InvalidVirtualDistribution";
    case ErrorCode::ZeroMassElement: return "ZeroMassElement";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::ZeroTorque: return "ZeroTorque";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::StaticallyIndeterminate: return "StaticallyIndeterminate";
  }
  return "Unknown";
}

}  // namespace pmw
