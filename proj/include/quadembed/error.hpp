#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadembed {

// Every failure surfaced by the library carries one of these codes. The CLI
// prints the code name in its machine-readable error record.
enum class ErrorCode {
  ConstraintViolation,
  DegenerateBasis,
  ExpansionResidual,
  NotTangent,
  DegreeOverflow,
  OffSphere,
  BadAngles,
  StepFailure,
  UnsupportedManifold,
  NoConvergence,
  NotOrthogonal,
  UnclassifiedCommutator,
  ParseError,
  InvalidArgument,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::ExpansionResidual: return "ExpansionResidual";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::OffSphere: return "OffSphere";
    case ErrorCode::BadAngles: return "BadAngles";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::UnsupportedManifold: return "UnsupportedManifold";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::UnclassifiedCommutator: return "UnclassifiedCommutator";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace quadembed
