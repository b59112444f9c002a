#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rra/assortment.h"
#include "rra/lp.h"
#include "rra/model.h"

namespace rra {

/// Size limits under which the exact dynamic program is allowed to run.
struct TinyInstanceGuard {
  std::size_t max_rewards = 1;
  TimeStep max_horizon = 8;
  double max_capacity = 3.0;
  int max_duration = 3;
  std::size_t max_support = 3;
  std::size_t max_types = 3;
  std::size_t max_actions = 3;
  double max_states = 1e7;

  /// Throws kGuardViolation when `instance` or `horizon` exceed a limit or
  /// the state bound is above max_states. The instance must be tabular.
  void check(const Instance& instance, TimeStep horizon) const;

  /// Upper bound on the number of DP states: T * |O|^(d_max - 1), where O is
  /// the set of distinct realizable outcome vectors including zero. An
  /// occupancy profile is a function of the last d_max - 1 outcomes.
  static double state_bound(const Instance& instance, TimeStep horizon);
};

/// Key of a DP decision: the step, the arrived type and the occupancy
/// profile quantized to 1e-9 units (per resource, amounts freed after
/// 1, 2, ... d_max - 1 more steps).
struct DpStateKey {
  TimeStep t = 0;
  TypeIndex type = 0;
  std::vector<std::int64_t> profile;

  auto operator<=>(const DpStateKey&) const = default;
};

struct DpValue {
  double total = 0.0;     // optimal E[sum_t W(t)]
  double per_step = 0.0;  // total / T
  std::map<DpStateKey, ActionIndex> policy;
  std::size_t states = 0;  // distinct (t, profile) pairs evaluated
};

/// Exact optimum of the single-objective dynamic problem with the hard
/// capacity constraint: an action is admissible in a state only if every
/// outcome in its support keeps occupancy within capacity. Ties go to the
/// lowest action index.
DpValue dp_opt_ipc(const Instance& instance, TimeStep horizon,
                   const TinyInstanceGuard& guard = {});

/// Exhaustive maximum of sum_i rho_i q_i over all assortments of size <= n,
/// the empty one included. Ties go to the first assortment in
/// (size, lexicographic) order. Throws kTooLarge above 1e6 assortments.
AssortmentChoice enumerate_assortments(std::span<const double> utilities,
                                       std::span<const double> rho, std::size_t max_size);

/// Optimum of the horizon-expanded program (per-step lambda).
LpSolution solve_lp_e_instance(const Instance& instance, TimeStep horizon,
                               const LpOptions& options = {});

/// Optimum of the steady-state program solved densely (per-step lambda).
LpSolution solve_lp_s_instance(const Instance& instance, const LpOptions& options = {});

struct ExpandedBoundCheck {
  double lp_e = 0.0;  // per step
  double dp = 0.0;    // per step
  bool holds = false;
};

/// Compares opt(LP-E) with the DP optimum (both per step) with tolerance
/// 1e-9. Throws kGuardViolation when the guard fails.
ExpandedBoundCheck verify_expanded_lp_bound(const Instance& instance, TimeStep horizon,
                          const TinyInstanceGuard& guard = {});

}  // namespace rra
