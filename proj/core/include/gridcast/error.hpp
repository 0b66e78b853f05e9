#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridcast {

// Every failure the library reports maps onto one of these codes.
enum class ErrorCode {
  EmptyOverlap,
  DegenerateSplit,
  IndexMismatch,
  EmptyHierarchy,
  InvalidArgument,
  ParseError,
  MissingZone,
  StationCountMismatch,
  NonMonotonicTimestamps,
  MalformedDay,
  AllBad,
  CalendarGap,
  ShapeMismatch,
  EmptyVariableList,
  MaskAllBlocked,
  SchemaMismatch,
  NonFiniteLoss,
  WindowTooShort,
  NonConvergence,
  SeriesTooShort,
  ZeroActual,
  NoWindows,
  DegenerateVariance,
  BudgetExceedsSpace,
  WindowSetMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace gridcast
