#include "kinsolve/errors.hpp"

namespace kinsolve {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RootHasNoBone: return "RootHasNoBone";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::DegenerateTriplet: return "DegenerateTriplet";
    case ErrorCode::ZeroBone: return "ZeroBone";
    case ErrorCode::CoincidentAC: return "CoincidentAC";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::DegenerateObservation: return "DegenerateObservation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

KinError::KinError(ErrorCode code, const std::string& msg)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}

bool KinError::is_input_error() const {
  switch (code_) {
    case ErrorCode::SchemaError:
    case ErrorCode::IoError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::RootHasNoBone:
      return true;
    default:
      return false;
  }
}

void raise(ErrorCode code, const std::string& msg) { throw KinError(code, msg); }

}  // namespace kinsolve
