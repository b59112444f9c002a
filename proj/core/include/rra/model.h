#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rra/error.h"

namespace rra {

using Rng = std::mt19937_64;

/// Derives an independent generator for `stream` from an experiment seed.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// The three named substreams of one episode. The environment draws
/// arrivals and outcomes; the policy owns its internal randomness.
struct EpisodeStreams {
  Rng arrivals;
  Rng outcomes;
  Rng policy;

  static EpisodeStreams from_seed(std::uint64_t seed);
};

/// Realized (W, A, D) for one decision.
struct Outcome {
  std::vector<double> rewards;      // over reward indices
  std::vector<double> allocations;  // over resource indices
  std::vector<int> durations;       // over resource indices, time steps

  Outcome() = default;
  Outcome(std::size_t n_rewards, std::size_t n_resources)
      : rewards(n_rewards, 0.0),
        allocations(n_resources, 0.0),
        durations(n_resources, 0) {}

  void clear();
  bool is_zero() const;
};

/// Almost-sure support bounds declared by an outcome model.
struct SupportBounds {
  double w_max = 0.0;
  double a_max = 0.0;
  int d_max = 0;
};

/// Outcome distributions O_{jk} together with their means. Implementations
/// are immutable and may be shared across threads.
class OutcomeModel {
 public:
  virtual ~OutcomeModel() = default;

  virtual std::size_t num_rewards() const = 0;
  virtual std::size_t num_resources() const = 0;
  virtual std::size_t num_types() const = 0;
  virtual std::size_t num_actions() const = 0;

  /// Writes w_{.jk} into `reward` and v_{.jk} = E[A D] into `volume`.
  virtual void mean_outcome(TypeIndex j, ActionIndex k, std::span<double> reward,
                            std::span<double> volume) const = 0;

  /// Writes a_{.jk} = E[A] and d_{.jk} = E[D].
  virtual void mean_allocation(TypeIndex j, ActionIndex k, std::span<double> alloc,
                               std::span<double> duration) const = 0;

  /// Writes E[A_{ijk} 1(D_{ijk} >= s)] for s = 1..horizon, row-major by
  /// resource: out[i * horizon + (s - 1)].
  virtual void mean_tail(TypeIndex j, ActionIndex k, int horizon,
                         std::span<double> out) const = 0;

  virtual void sample(Rng& rng, TypeIndex j, ActionIndex k, Outcome& out) const = 0;

  virtual SupportBounds support_bounds() const = 0;

  /// v_max = max_{i,j,k} v_{ijk}. The default enumerates every pair.
  virtual double max_mean_volume() const;
};

/// One atom of a finite-support joint outcome distribution.
struct SupportPoint {
  double probability = 0.0;
  std::vector<double> rewards;
  std::vector<double> allocations;
  std::vector<int> durations;
};

/// Outcome model given by explicit finite-support tables per (j, k). Pairs
/// without a table produce the zero outcome with certainty.
class TabularOutcomeModel final : public OutcomeModel {
 public:
  TabularOutcomeModel(std::size_t n_rewards, std::size_t n_resources, std::size_t n_types,
                      std::size_t n_actions);

  /// Replaces the distribution of (j, k). Probabilities must sum to one.
  void set_distribution(TypeIndex j, ActionIndex k, std::vector<SupportPoint> support);
  /// Shorthand for a deterministic outcome.
  void set_deterministic(TypeIndex j, ActionIndex k, std::vector<double> rewards,
                         std::vector<double> allocations, std::vector<int> durations);
  void clear_distribution(TypeIndex j, ActionIndex k);

  const std::vector<SupportPoint>& support(TypeIndex j, ActionIndex k) const;

  /// Optional declared bounds; when absent the support maxima are used.
  void declare_bounds(std::optional<double> w_max, std::optional<double> a_max,
                      std::optional<int> d_max);

  std::size_t num_rewards() const override { return n_rewards_; }
  std::size_t num_resources() const override { return n_resources_; }
  std::size_t num_types() const override { return n_types_; }
  std::size_t num_actions() const override { return n_actions_; }

  void mean_outcome(TypeIndex j, ActionIndex k, std::span<double> reward,
                    std::span<double> volume) const override;
  void mean_allocation(TypeIndex j, ActionIndex k, std::span<double> alloc,
                       std::span<double> duration) const override;
  void mean_tail(TypeIndex j, ActionIndex k, int horizon, std::span<double> out) const override;
  void sample(Rng& rng, TypeIndex j, ActionIndex k, Outcome& out) const override;
  SupportBounds support_bounds() const override;
  double max_mean_volume() const override;

 private:
  struct Cell {
    std::vector<SupportPoint> support;
    std::vector<double> mean_reward;
    std::vector<double> mean_volume;
    std::vector<double> mean_alloc;
    std::vector<double> mean_duration;
    std::vector<double> cumulative;  // for sampling
  };

  std::size_t index(TypeIndex j, ActionIndex k) const;
  void recompute(Cell& cell) const;

  std::size_t n_rewards_;
  std::size_t n_resources_;
  std::size_t n_types_;
  std::size_t n_actions_;
  std::vector<Cell> cells_;
  std::optional<double> declared_w_max_;
  std::optional<double> declared_a_max_;
  std::optional<int> declared_d_max_;
};

/// Raw description from which a validated Instance is built.
struct InstanceSpec {
  std::vector<double> capacities;
  std::vector<double> arrival_probs;
  std::optional<TypeIndex> null_type;
  std::optional<ActionIndex> null_action;
  std::shared_ptr<const OutcomeModel> outcomes;
  std::optional<TimeStep> horizon_hint;
};

/// A validated problem instance. Immutable and cheap to copy (the outcome
/// model is shared).
class Instance {
 public:
  std::size_t num_rewards() const { return outcomes_->num_rewards(); }
  std::size_t num_resources() const { return outcomes_->num_resources(); }
  std::size_t num_types() const { return outcomes_->num_types(); }
  std::size_t num_actions() const { return outcomes_->num_actions(); }

  const std::vector<double>& capacities() const { return capacities_; }
  const std::vector<double>& arrival_probs() const { return arrival_probs_; }
  TypeIndex null_type() const { return null_type_; }
  ActionIndex null_action() const { return null_action_; }
  const OutcomeModel& outcomes() const { return *outcomes_; }
  std::shared_ptr<const OutcomeModel> shared_outcomes() const { return outcomes_; }
  std::optional<TimeStep> horizon_hint() const { return horizon_hint_; }

  /// Same instance with every capacity replaced.
  Instance with_capacities(std::vector<double> capacities) const;
  /// Same instance with a different arrival distribution.
  Instance with_arrival_probs(std::vector<double> probs) const;

 private:
  friend Instance build_instance(InstanceSpec spec);
  Instance() = default;

  std::vector<double> capacities_;
  std::vector<double> arrival_probs_;
  TypeIndex null_type_ = 0;
  ActionIndex null_action_ = 0;
  std::shared_ptr<const OutcomeModel> outcomes_;
  std::optional<TimeStep> horizon_hint_;
};

/// Validates `spec` and returns the Instance. Throws kMalformedProbabilities,
/// kNonpositiveCapacity, kMissingNullType, kMissingNullAction,
/// kDimensionMismatch or kInvalidArgument.
Instance build_instance(InstanceSpec spec);

/// Draws a type index distributed as `p`.
TypeIndex sample_arrival(Rng& rng, std::span<const double> p);

/// Reusable arrival sampler for a fixed distribution.
class ArrivalSampler {
 public:
  explicit ArrivalSampler(std::span<const double> p);
  TypeIndex operator()(Rng& rng) { return static_cast<TypeIndex>(dist_(rng)); }

 private:
  std::discrete_distribution<std::size_t> dist_;
};

/// Draws an outcome of O_{jk}; checks indices.
Outcome sample_outcome(const Instance& instance, Rng& rng, TypeIndex j, ActionIndex k);

struct MeanOutcome {
  std::vector<double> reward;  // w_{.jk}
  std::vector<double> volume;  // v_{.jk}
};

/// The per-arrival information revealed to a policy: {(w_{jk}, v_{jk})}_k.
std::vector<MeanOutcome> mean_outcomes_for_type(const Instance& instance, TypeIndex j);

struct Bounds {
  double w_max = 0.0;
  double a_max = 0.0;
  int d_max = 0;
  double v_max = 0.0;
  double gamma = 0.0;  // max(w_max, v_max)
  double c_min = 0.0;
  double xi = 0.0;     // a_max / c_min
  std::size_t n_resources = 0;
  double assumption_value = 0.0;  // xi * log(|I_c| / xi)
  bool assumption_holds = false;  // assumption_value <= 1
};

/// Derives the policy-visible bounds from raw quantities.
Bounds make_bounds(double w_max, double a_max, int d_max, double v_max, double c_min,
                   std::size_t n_resources);

Bounds compute_bounds(const Instance& instance);

}  // namespace rra
