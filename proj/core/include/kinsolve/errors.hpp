#pragma once

#include <stdexcept>
#include <string>

namespace kinsolve {

// Failure classes surfaced by the library. The first group flags malformed
// input (files, schemas, mismatched dimensions); the rest are numerical
// domain failures raised by the solvers.
enum class ErrorCode {
  SchemaError,
  IoError,
  DimensionMismatch,
  RootHasNoBone,

  ZeroVector,
  Degenerate,
  DegenerateTriplet,
  ZeroBone,
  CoincidentAC,
  BehindCamera,
  DegenerateObservation,
  NonFinite,
  Infeasible,
};

const char* error_code_name(ErrorCode code);

class KinError : public std::runtime_error {
 public:
  KinError(ErrorCode code, const std::string& msg);

  ErrorCode code() const { return code_; }

  // Malformed input, as opposed to a numerical failure on valid input.
  bool is_input_error() const;

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& msg);

}  // namespace kinsolve
