#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rra/model.h"

namespace rra {

/// Per-resource schedule of units in use and the steps at which they return.
///
/// An allocation made at step t with duration D occupies steps t..t+D-1 and
/// is released at the start of step t+D. A duration of zero occupies nothing.
class OccupancyLedger {
 public:
  explicit OccupancyLedger(std::size_t n_resources);

  std::size_t num_resources() const { return n_resources_; }
  TimeStep now() const { return now_; }

  /// Moves the clock to step `t` (must not go backwards), releasing every
  /// allocation whose release step is <= t.
  void advance_to(TimeStep t);

  /// Registers an allocation made at the current step.
  void allocate(std::span<const double> allocations, std::span<const int> durations);

  double occupied(ResourceIndex i) const { return occupied_[i]; }
  const std::vector<double>& occupied_now() const { return occupied_; }

 private:
  void recompute();

  std::size_t n_resources_;
  TimeStep now_ = 0;
  // release step -> units returning then, per resource
  std::map<TimeStep, std::vector<double>> releases_;
  std::vector<double> occupied_;
};

/// True iff occupied_i + a_max <= c_i for every resource. In exact arithmetic
/// this is occupied_i <= c_i - a_max; the additive form keeps the
/// post-allocation bound exact in floating point as well.
bool feasibility_gate(const OccupancyLedger& ledger, std::span<const double> capacities,
                      double a_max);

/// What a policy learns when a customer arrives.
struct Arrival {
  TimeStep t = 0;
  TypeIndex type = 0;
};

/// A non-anticipatory decision rule. Policies never see the arrival
/// distribution, the horizon, or future arrivals; everything they know about
/// the instance is handed to them at construction time.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  /// Intended action for this arrival, before the feasibility gate.
  virtual ActionIndex propose(const Arrival& arrival, Rng& rng) = 0;
  /// Called after the step with the executed action and realized outcome.
  virtual void observe(const Arrival& arrival, ActionIndex executed, const Outcome& outcome);
};

struct StepRecord {
  TimeStep t = 0;
  TypeIndex arrival_type = 0;
  ActionIndex proposed = 0;
  ActionIndex action = 0;  // executed after gating
  Outcome outcome;
  std::vector<double> occupied;     // after this step's allocation
  std::vector<double> cum_rewards;  // through this step
};

struct Trajectory {
  std::size_t n_rewards = 0;
  std::size_t n_resources = 0;
  std::vector<StepRecord> steps;

  TimeStep horizon() const { return static_cast<TimeStep>(steps.size()); }
};

/// Step-by-step environment. Owns the ledger and cumulative rewards.
class Simulator {
 public:
  Simulator(const Instance& instance, double a_max);

  const Instance& instance() const { return *instance_; }
  const OccupancyLedger& ledger() const { return ledger_; }
  /// The step that the next call to `step` will execute (1-based).
  TimeStep next_time() const { return next_t_; }

  /// Releases resources due at the upcoming step; idempotent.
  void prepare_step();
  /// Gate evaluated on the occupancy seen by the upcoming step.
  bool gate_open();

  /// Executes `action` for an arrival of `type` at the upcoming step.
  /// Throws kConstraintViolation if the allocation would exceed a capacity.
  StepRecord step(TypeIndex type, ActionIndex action, Rng& outcome_rng);

  /// Test hook: allow `step` to be called without the gate check so that the
  /// defensive capacity check can be exercised.
  void set_bypass_gate(bool bypass) { bypass_gate_ = bypass; }

  const std::vector<double>& cumulative_rewards() const { return cum_; }

 private:
  const Instance* instance_;
  double a_max_;
  OccupancyLedger ledger_;
  TimeStep next_t_ = 1;
  std::vector<double> cum_;
  bool bypass_gate_ = false;
};

struct EpisodeOptions {
  TimeStep horizon = 0;
  std::uint64_t seed = 0;
  /// Optional override of a_max used by the gate; defaults to the support bound.
  std::optional<double> a_max;
  /// When true, the gate is skipped (test hook for the defensive check).
  bool bypass_gate = false;
};

/// Runs `policy` for `options.horizon` steps with the seed's named streams.
Trajectory run_episode(const Instance& instance, Policy& policy, const EpisodeOptions& options);

/// Same, with caller-provided streams.
Trajectory run_episode(const Instance& instance, Policy& policy, TimeStep horizon,
                       EpisodeStreams& streams, std::optional<double> a_max = std::nullopt,
                       bool bypass_gate = false);

/// Recomputes per-step occupancy from the realized outcomes alone, using the
/// definition sum_{tau <= t} A_i(tau) 1(D_i(tau) >= t - tau + 1).
std::vector<std::vector<double>> recompute_occupancy(const Trajectory& trajectory);

/// Counts (t, i) pairs where occupancy exceeds capacity, using the
/// independently recomputed occupancy.
std::size_t count_capacity_violations(const Trajectory& trajectory,
                                      std::span<const double> capacities);

/// CSV columns: t, arrival_type, action, W_1.., occupied_1.., cum_W_1..
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
Trajectory read_trajectory_csv(std::istream& in, std::size_t n_rewards, std::size_t n_resources);

}  // namespace rra
