#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rra/assortment.h"
#include "rra/model.h"

namespace rra {

/// Two-action single-resource instance: one type with p = 1, a null type with
/// p = 0 (index 1), actions {null, k_1, k_2} with deterministic A = 1 and the
/// given rewards and durations.
Instance two_action_instance(double capacity, double w1, int d1, double w2, int d2);

/// The d/8 gap instance: c = d/2, k_1 = (W 3/4, D d/2), k_2 = (W 1, D d).
/// Requires an even d >= 2.
Instance gap_instance(int d);

/// Shape of random tabular instances. Counts exclude the null type and the
/// null action, which are always added (null type last with p = 0, null
/// action at index 0). All values are multiples of `grid` so that sums are
/// exact in floating point.
struct RandomTabularParams {
  std::size_t n_rewards = 1;
  std::size_t n_resources = 1;
  std::size_t n_types = 2;
  std::size_t n_actions = 2;
  std::size_t max_support = 3;
  int max_duration = 3;
  int max_capacity = 3;       // capacities drawn from {1, ..., max_capacity}
  double max_allocation = 1.0;
  double max_reward = 1.0;
  double grid = 0.25;
};

/// Parameters used by the exact DP sweep (|J|, |K| <= 3 including nulls).
RandomTabularParams tiny_params();
/// Parameters used by the horizon-expanded sweep (|J|, |K| <= 4).
RandomTabularParams small_params();

Instance random_tabular_instance(const RandomTabularParams& params, Rng& rng);

/// Synthetic assortment application. Per-customer data comes from its own
/// substream, so instances with fewer customers are prefixes of larger ones.
struct SyntheticParams {
  std::size_t n_resources = 14;
  std::size_t n_types = 1000;  // customers, excluding the null type
  std::size_t max_assortment = 5;
  std::size_t feature_dim = 5;
  double price_min = 1.0;
  double price_max = 2.0;
  double utility_scale = 2.0;  // customer features uniform in [-s, s]
  int duration_cap = 100;
  std::size_t duration_support = 3;
  std::vector<double> sigma{1.0, 1.0, 1.0};
};

struct SyntheticInstance {
  std::shared_ptr<const MnlModel> mnl;
  std::shared_ptr<const MnlOutcomeModel> outcomes;
  KpiConfig kpi;
  std::vector<double> customer_probs;

  /// Instance with every capacity set to a_max / xi (a_max = 1).
  Instance instance(double xi) const;
};

SyntheticInstance generate_synthetic_instance(const SyntheticParams& params, std::uint64_t seed);

}  // namespace rra
