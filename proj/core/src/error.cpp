#include "circlestab/error.hpp"

namespace circlestab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidCircle: return "InvalidCircle";
    case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::DisjointnessBroken: return "DisjointnessBroken";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::ShellCrossed: return "ShellCrossed";
    case ErrorCode::ShellNotFound: return "ShellNotFound";
    case ErrorCode::TieBreakNeeded: return "TieBreakNeeded";
    case ErrorCode::MaxTimeExceeded: return "MaxTimeExceeded";
    case ErrorCode::NoRouteFound: return "NoRouteFound";
    case ErrorCode::DegenerateTube: return "DegenerateTube";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::SimplexNotFound: return "SimplexNotFound";
    case ErrorCode::NotSimplicial: return "NotSimplicial";
    case ErrorCode::FlagViolation: return "FlagViolation";
    case ErrorCode::FieldOnly: return "FieldOnly";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_feasibility_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ShellNotFound:
    case ErrorCode::ShellCrossed:
    case ErrorCode::NoRouteFound:
    case ErrorCode::MaxTimeExceeded:
    case ErrorCode::GenerationFailed:
    case ErrorCode::DegenerateTube:
    case ErrorCode::TieBreakNeeded:
    case ErrorCode::DisjointnessBroken:
    case ErrorCode::Overflow:
      return true;
    default:
      return false;
  }
}

}  // namespace circlestab
