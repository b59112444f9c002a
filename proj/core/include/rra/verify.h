#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rra/lp.h"

namespace rra {

enum class VerifyLevel { kQuick, kFull };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::kQuick;
  /// Test hook: solve every audited program with a corrupted pricing
  /// tolerance, which must make the duality audit fail.
  bool corrupt_lp_tolerance = false;
  /// Names of criteria to run; empty runs all of them.
  std::vector<std::string> only;
  /// Called with each result as soon as it is known.
  std::function<void(const struct CriterionResult&)> on_result;
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;     // measured values
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; 0 for none
};

/// Names of all criteria, in execution order.
std::vector<std::string> criterion_names();

/// Runs the cross-module acceptance checks. The quick level shrinks the
/// end-to-end experiments (fewer seeds, shorter horizon); the full level runs
/// them at their stated sizes.
std::vector<CriterionResult> run_verify_suite(const VerifyOptions& options);

/// One line per result: "PASS name (1.23 s): detail".
std::string format_result(const CriterionResult& result);

/// The LP options used by the audit under `options`.
LpOptions audit_lp_options(const VerifyOptions& options);

}  // namespace rra
