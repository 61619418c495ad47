#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace circlestab {

enum class ErrorCode {
  InvalidArgument,
  InvalidCircle,
  InvalidConfiguration,
  DegenerateGeometry,
  DisjointnessBroken,
  GenerationFailed,
  ShellCrossed,
  ShellNotFound,
  TieBreakNeeded,
  MaxTimeExceeded,
  NoRouteFound,
  DegenerateTube,
  ValidationFailed,
  SimplexNotFound,
  NotSimplicial,
  FlagViolation,
  FieldOnly,
  NotCommuting,
  Overflow,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// True for failures that come from numerical feasibility (a search that ran
// out of room) rather than from malformed input.
bool is_feasibility_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace circlestab
