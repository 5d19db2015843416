#include "gencap/error.hpp"

namespace gencap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMeasure: return "EmptyMeasure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::TooManyBreakpoints: return "TooManyBreakpoints";
    case ErrorCode::NonzeroBoundary: return "NonzeroBoundary";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InfeasibleEpsilon: return "InfeasibleEpsilon";
    case ErrorCode::EpsilonBelowResolution: return "EpsilonBelowResolution";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::NotSingular: return "NotSingular";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gencap
