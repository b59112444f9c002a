#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rra/colgen.h"
#include "rra/mwu.h"
#include "rra/simulator.h"

namespace rra {

/// Phase boundaries: tau(-1) = d_max and tau(q) = 2 tau(q-1), read as
/// cumulative end times. Phase q covers steps tau(q-1)+1 .. tau(q).
class PhaseSchedule {
 public:
  explicit PhaseSchedule(int d_max);

  int d_max() const { return d_max_; }
  /// tau(q) = d_max * 2^(q+1), for q >= -1.
  TimeStep tau(int q) const;
  /// Phase containing step t >= 1.
  int phase_of(TimeStep t) const;
  TimeStep phase_begin(int q) const { return q < 0 ? 1 : tau(q - 1) + 1; }
  TimeStep phase_end(int q) const { return tau(q); }

 private:
  int d_max_;
};

struct ErrorParams {
  double eps_a = 0.0;
  double eps_b = 0.0;
  double eps_c = 0.0;
  double eps_d = 0.0;
  double eps_d_bar = 0.0;  // eps_d / c_min
  double eta = 0.0;        // sqrt(xi log(|I_c| / xi))
  double tau_prev = 0.0;   // tau(q-1) used in every formula

  /// 1 / (1 + eps_d_bar + eta).
  double thinning_probability() const { return 1.0 / (1.0 + eps_d_bar + eta); }
};

/// Per-phase error parameters. Throws kInvalidDelta unless 0 < delta < 1.
ErrorParams error_params(int q, double delta, const Bounds& bounds, std::size_t n_rewards,
                         std::size_t n_resources);

/// Same formulas for an explicit tau(q-1).
ErrorParams error_params_for_tau(double tau_prev, double delta, const Bounds& bounds,
                                 std::size_t n_rewards, std::size_t n_resources);

/// Everything a policy may know: the mean outcomes, the oracle, the declared
/// bounds and the capacities. The arrival distribution and the horizon are
/// deliberately absent.
struct PolicyContext {
  std::shared_ptr<const MeanView> means;
  std::shared_ptr<const KappaOracle> kappa;
  Bounds bounds;
  std::vector<double> capacities;
  ActionIndex null_action = 0;

  /// Context over `instance` with the given oracle (enumeration if null).
  static PolicyContext from_instance(const Instance& instance,
                                     std::shared_ptr<const KappaOracle> kappa = nullptr);
};

/// Solves the sample-average steady-state program for the empirical
/// distribution of `window` and returns its optimum.
double estimate_lambda_hat(std::span<const TypeIndex> window, const MeanView& means,
                           std::span<const double> capacities, const KappaOracle& pricing,
                           const ColgenOptions& options = {});

struct ImwuOptions {
  double delta = 0.1;
  /// Test hook: replaces 1 / (1 + eps_d_bar + eta) when set.
  std::optional<double> thinning_override;
  /// Keep the virtual MWU trace of the most recent phase.
  bool record_trace = false;
};

/// Iterated MWU. Phase -1 proposes the lowest-index non-null action; every
/// later phase re-estimates lambda from the second half of the previous
/// window, replays the first half through the virtual MWU, and then thins
/// the oracle's choice.
class ImwuPolicy final : public Policy {
 public:
  ImwuPolicy(PolicyContext context, ImwuOptions options = {});

  std::string name() const override { return "imwu"; }
  ActionIndex propose(const Arrival& arrival, Rng& rng) override;

  int current_phase() const { return phase_; }
  double lambda_hat() const { return lambda_hat_; }
  const std::vector<WeightVector>& theta() const { return theta_; }
  const ErrorParams& params() const { return params_; }
  double thinning_probability() const;
  const PhaseSchedule& schedule() const { return schedule_; }
  const std::vector<MwuTraceRow>& trace() const { return trace_; }
  /// Steps (1-based, inclusive) whose arrival types fed the virtual MWU and
  /// the lambda estimate of the current phase.
  std::pair<TimeStep, TimeStep> mwu_window() const { return mwu_window_; }
  std::pair<TimeStep, TimeStep> estimate_window() const { return estimate_window_; }

  /// Prepares phase q from the recorded arrival types. Public so that tests
  /// can drive it directly.
  void start_phase(int q);

 private:
  PolicyContext ctx_;
  ImwuOptions opt_;
  PhaseSchedule schedule_;
  ActionIndex warmup_action_;
  std::vector<TypeIndex> types_;  // j(1), j(2), ...
  int phase_ = -1;
  double lambda_hat_ = 0.0;
  ErrorParams params_;
  std::vector<WeightVector> theta_;
  std::vector<MwuTraceRow> trace_;
  std::pair<TimeStep, TimeStep> mwu_window_{0, 0};
  std::pair<TimeStep, TimeStep> estimate_window_{0, 0};
};

/// Offline static algorithm: knows p, solves the steady-state program, and
/// proposes k with probability y*_{jk} / (1 + eta_bar).
class OsaPolicy final : public Policy {
 public:
  OsaPolicy(std::size_t n_types, const std::vector<PlanEntry>& plan, double eta_bar,
            ActionIndex null_action);

  std::string name() const override { return "osa"; }
  ActionIndex propose(const Arrival& arrival, Rng& rng) override;
  double eta_bar() const { return eta_bar_; }

 private:
  std::vector<std::vector<std::pair<ActionIndex, double>>> by_type_;
  double eta_bar_;
  ActionIndex null_action_;
};

class NullPolicy final : public Policy {
 public:
  explicit NullPolicy(ActionIndex null_action) : null_action_(null_action) {}
  std::string name() const override { return "null"; }
  ActionIndex propose(const Arrival&, Rng&) override { return null_action_; }

 private:
  ActionIndex null_action_;
};

/// Myopic baseline: maximizes the summed mean reward, ignoring resources.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(PolicyContext context);
  std::string name() const override { return "greedy"; }
  ActionIndex propose(const Arrival& arrival, Rng& rng) override;

 private:
  PolicyContext ctx_;
  WeightVector weights_;
};

/// Always proposes one fixed action. Used by tests and hand simulations.
class FixedActionPolicy final : public Policy {
 public:
  explicit FixedActionPolicy(ActionIndex action) : action_(action) {}
  std::string name() const override { return "fixed"; }
  ActionIndex propose(const Arrival&, Rng&) override { return action_; }

 private:
  ActionIndex action_;
};

struct PolicyParams {
  double delta = 0.1;
  std::optional<double> eta_bar;  // OSA discount; defaults to sqrt(xi)
};

/// Builds a policy by name: "imwu", "osa", "null" or "greedy". OSA needs the
/// steady-state solution; the others ignore it. Throws kConfigError for an
/// unknown name.
std::unique_ptr<Policy> make_policy(std::string_view name, const PolicyContext& context,
                                    const PolicyParams& params,
                                    const SteadyStateResult* steady_state, std::size_t n_types);

}  // namespace rra
