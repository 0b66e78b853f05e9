#include "gridcast/error.hpp"

namespace gridcast {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::EmptyHierarchy: return "EmptyHierarchy";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingZone: return "MissingZone";
    case ErrorCode::StationCountMismatch: return "StationCountMismatch";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::MalformedDay: return "MalformedDay";
    case ErrorCode::AllBad: return "AllBad";
    case ErrorCode::CalendarGap: return "CalendarGap";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyVariableList: return "EmptyVariableList";
    case ErrorCode::MaskAllBlocked: return "MaskAllBlocked";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ZeroActual: return "ZeroActual";
    case ErrorCode::NoWindows: return "NoWindows";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::BudgetExceedsSpace: return "BudgetExceedsSpace";
    case ErrorCode::WindowSetMismatch: return "WindowSetMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace gridcast
