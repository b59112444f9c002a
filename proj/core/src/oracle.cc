#include "rra/oracle.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "rra/lp_builders.h"

namespace rra {

namespace {

constexpr double kQuantum = 1e9;

std::int64_t quantize(double x) { return std::llround(x * kQuantum); }

const TabularOutcomeModel& tabular(const Instance& instance) {
  const auto* model = dynamic_cast<const TabularOutcomeModel*>(&instance.outcomes());
  if (!model) throw Error(ErrorCode::kGuardViolation, "the exact DP needs a tabular outcome model");
  return *model;
}

int declared_d_max(const Instance& instance) {
  return std::max(1, instance.outcomes().support_bounds().d_max);
}

}  // namespace

// ---------------------------------------------------------------------------
// Guard

double TinyInstanceGuard::state_bound(const Instance& instance, TimeStep horizon) {
  const auto& model = tabular(instance);
  std::set<std::vector<std::int64_t>> outcomes;
  outcomes.insert(std::vector<std::int64_t>(2 * instance.num_resources(), 0));
  for (TypeIndex j = 0; j < instance.num_types(); ++j)
    for (ActionIndex k = 0; k < instance.num_actions(); ++k)
      for (const auto& pt : model.support(j, k)) {
        std::vector<std::int64_t> key;
        for (std::size_t i = 0; i < instance.num_resources(); ++i) {
          const bool occupies = pt.durations[i] >= 1;
          key.push_back(occupies ? quantize(pt.allocations[i]) : 0);
          key.push_back(occupies ? pt.durations[i] : 0);
        }
        outcomes.insert(std::move(key));
      }
  return static_cast<double>(horizon) *
         std::pow(static_cast<double>(outcomes.size()), declared_d_max(instance) - 1);
}

void TinyInstanceGuard::check(const Instance& instance, TimeStep horizon) const {
  const auto& model = tabular(instance);
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kGuardViolation, what); };
  if (instance.num_rewards() > max_rewards)
    fail(fmt::format("{} reward indices, limit {}", instance.num_rewards(), max_rewards));
  if (horizon < 1 || horizon > max_horizon) fail(fmt::format("horizon {} outside [1, {}]", horizon, max_horizon));
  for (double c : instance.capacities())
    if (c > max_capacity) fail(fmt::format("capacity {} above {}", c, max_capacity));
  if (instance.outcomes().support_bounds().d_max > max_duration)
    fail(fmt::format("d_max {} above {}", instance.outcomes().support_bounds().d_max, max_duration));
  if (instance.num_types() > max_types) fail(fmt::format("{} types, limit {}", instance.num_types(), max_types));
  if (instance.num_actions() > max_actions)
    fail(fmt::format("{} actions, limit {}", instance.num_actions(), max_actions));
  for (TypeIndex j = 0; j < instance.num_types(); ++j)
    for (ActionIndex k = 0; k < instance.num_actions(); ++k)
      if (model.support(j, k).size() > max_support)
        fail(fmt::format("support of ({}, {}) has {} points, limit {}", j, k, model.support(j, k).size(),
                         max_support));
  const double bound = state_bound(instance, horizon);
  if (bound > max_states) fail(fmt::format("state bound {} above {}", bound, max_states));
}

// ---------------------------------------------------------------------------
// Dynamic program

namespace {

class DpSolver {
 public:
  DpSolver(const Instance& instance, TimeStep horizon, DpValue& out)
      : instance_(instance),
        model_(tabular(instance)),
        horizon_(horizon),
        nc_(instance.num_resources()),
        buckets_(static_cast<std::size_t>(declared_d_max(instance) - 1)),
        out_(out) {
    for (double c : instance.capacities()) caps_.push_back(quantize(c));
  }

  // Expected reward collected from step t onward, before the arrival of t.
  double value(TimeStep t, const std::vector<std::int64_t>& profile) {
    if (t > horizon_) return 0.0;
    auto key = std::make_pair(t, profile);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    std::vector<std::int64_t> occupied(nc_, 0);
    for (std::size_t i = 0; i < nc_; ++i)
      for (std::size_t r = 0; r < buckets_; ++r) occupied[i] += profile[i * buckets_ + r];

    double total = 0.0;
    const auto& p = instance_.arrival_probs();
    for (TypeIndex j = 0; j < instance_.num_types(); ++j) {
      double best = 0.0;
      ActionIndex best_k = instance_.null_action();
      bool have = false;
      for (ActionIndex k = 0; k < instance_.num_actions(); ++k) {
        const bool null_pair = k == instance_.null_action() || j == instance_.null_type();
        if (!null_pair && !admissible(j, k, occupied)) continue;
        const double q = null_pair ? value(t + 1, advance(profile, nullptr)) : action_value(t, j, k, profile);
        if (!have || q > best + 1e-12) {
          best = q;
          best_k = k;
          have = true;
        }
      }
      out_.policy[DpStateKey{t, j, profile}] = best_k;
      total += p[j] * best;
    }
    memo_.emplace(std::move(key), total);
    return total;
  }

  std::size_t states() const { return memo_.size(); }

 private:
  bool admissible(TypeIndex j, ActionIndex k, const std::vector<std::int64_t>& occupied) const {
    for (const auto& pt : model_.support(j, k)) {
      if (pt.probability <= 0.0) continue;
      for (std::size_t i = 0; i < nc_; ++i)
        if (pt.durations[i] >= 1 && occupied[i] + quantize(pt.allocations[i]) > caps_[i]) return false;
    }
    return true;
  }

  double action_value(TimeStep t, TypeIndex j, ActionIndex k, const std::vector<std::int64_t>& profile) {
    double q = 0.0;
    for (const auto& pt : model_.support(j, k)) {
      if (pt.probability <= 0.0) continue;
      q += pt.probability * (pt.rewards[0] + value(t + 1, advance(profile, &pt)));
    }
    return q;
  }

  // Profile of step t + 1 after the outcome `pt` (or nothing) at step t.
  std::vector<std::int64_t> advance(const std::vector<std::int64_t>& profile, const SupportPoint* pt) const {
    std::vector<std::int64_t> next(profile.size(), 0);
    for (std::size_t i = 0; i < nc_; ++i) {
      for (std::size_t r = 1; r < buckets_; ++r) next[i * buckets_ + r - 1] = profile[i * buckets_ + r];
      if (pt && pt->durations[i] >= 2) {
        // Occupied through step t + D - 1, so D - 1 more steps remain.
        next[i * buckets_ + static_cast<std::size_t>(pt->durations[i] - 2)] += quantize(pt->allocations[i]);
      }
    }
    return next;
  }

  const Instance& instance_;
  const TabularOutcomeModel& model_;
  TimeStep horizon_;
  std::size_t nc_;
  std::size_t buckets_;
  std::vector<std::int64_t> caps_;
  DpValue& out_;
  std::map<std::pair<TimeStep, std::vector<std::int64_t>>, double> memo_;
};

}  // namespace

DpValue dp_opt_ipc(const Instance& instance, TimeStep horizon, const TinyInstanceGuard& guard) {
  guard.check(instance, horizon);
  if (instance.num_rewards() != 1)
    throw Error(ErrorCode::kGuardViolation, "the exact DP handles a single reward index");
  DpValue out;
  DpSolver solver(instance, horizon, out);
  const std::size_t buckets = static_cast<std::size_t>(declared_d_max(instance) - 1);
  out.total = solver.value(1, std::vector<std::int64_t>(instance.num_resources() * buckets, 0));
  out.per_step = out.total / static_cast<double>(horizon);
  out.states = solver.states();
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration and LP helpers

AssortmentChoice enumerate_assortments(std::span<const double> utilities,
                                       std::span<const double> rho, std::size_t max_size) {
  if (utilities.size() != rho.size())
    throw Error(ErrorCode::kDimensionMismatch, "utilities and coefficients differ in length");
  const std::size_t m = utilities.size();
  const std::size_t n = std::min(max_size, m);
  double count = 0.0, binom = 1.0;
  for (std::size_t s = 0; s <= n; ++s) {
    count += binom;
    binom = binom * static_cast<double>(m - s) / static_cast<double>(s + 1);
  }
  if (count > 1e6)
    throw Error(ErrorCode::kTooLarge, fmt::format("{} assortments exceed the enumeration limit", count));

  AssortmentChoice best;  // the empty assortment, objective 0
  if (n == 0) return best;
  const AssortmentCatalog catalog(m, n);
  for (ActionIndex k = 1; k < catalog.size(); ++k) {
    const auto items = catalog.items(k);
    const double value = assortment_value(utilities, rho, items);
    if (value > best.objective + 1e-12) {
      best.objective = value;
      best.items = items;
    }
  }
  return best;
}

LpSolution solve_lp_e_instance(const Instance& instance, TimeStep horizon, const LpOptions& options) {
  const MeanTable means = MeanTable::from_instance(instance);
  const TailTable tails = TailTable::from_instance(instance, declared_d_max(instance));
  const BuiltLpE built = build_lp_e(means, tails, instance.arrival_probs(), instance.capacities(), horizon);
  return solve_lp(built.lp, options);
}

LpSolution solve_lp_s_instance(const Instance& instance, const LpOptions& options) {
  const MeanTable means = MeanTable::from_instance(instance);
  const BuiltLpS built = build_lp_s(means, instance.arrival_probs(), instance.capacities());
  return solve_lp(built.lp, options);
}

ExpandedBoundCheck verify_expanded_lp_bound(const Instance& instance, TimeStep horizon, const TinyInstanceGuard& guard) {
  ExpandedBoundCheck check;
  check.dp = dp_opt_ipc(instance, horizon, guard).per_step;
  const LpSolution sol = solve_lp_e_instance(instance, horizon);
  if (!sol.optimal())
    throw Error(ErrorCode::kNumericalFailure,
                fmt::format("horizon-expanded program ended {}", to_string(sol.status)));
  check.lp_e = sol.objective;
  check.holds = check.lp_e >= check.dp - 1e-9;
  return check;
}

}  // namespace rra
