#include "rra/error.h"

namespace rra {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidDelta: return "invalid-delta";
    case ErrorCode::kMalformedProbabilities: return "malformed-probabilities";
    case ErrorCode::kNonpositiveCapacity: return "nonpositive-capacity";
    case ErrorCode::kMissingNullType: return "missing-null-type";
    case ErrorCode::kMissingNullAction: return "missing-null-action";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kConstraintViolation: return "constraint-violation";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kTooLarge: return "too-large";
    case ErrorCode::kOracleFailure: return "oracle-failure";
    case ErrorCode::kEmptySampleWindow: return "empty-sample-window";
    case ErrorCode::kPhaseNotInitialized: return "phase-not-initialized";
    case ErrorCode::kZeroBenchmark: return "zero-benchmark";
    case ErrorCode::kItemNotOffered: return "item-not-offered";
    case ErrorCode::kGuardViolation: return "guard-violation";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace rra
