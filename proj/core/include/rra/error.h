#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rra {

using TypeIndex = std::size_t;
using ActionIndex = std::size_t;
using ResourceIndex = std::size_t;
using TimeStep = std::int64_t;

enum class ErrorCode {
  kInvalidArgument,
  kInvalidDelta,
  kMalformedProbabilities,
  kNonpositiveCapacity,
  kMissingNullType,
  kMissingNullAction,
  kIndexOutOfRange,
  kDimensionMismatch,
  kConstraintViolation,
  kNumericalFailure,
  kTooLarge,
  kOracleFailure,
  kEmptySampleWindow,
  kPhaseNotInitialized,
  kZeroBenchmark,
  kItemNotOffered,
  kGuardViolation,
  kConfigError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. Every failure path in the
/// library throws this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rra
