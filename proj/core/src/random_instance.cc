#include "rra/random_instance.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace rra {

Instance two_action_instance(double capacity, double w1, int d1, double w2, int d2) {
  auto model = std::make_shared<TabularOutcomeModel>(1, 1, 2, 3);
  model->set_deterministic(0, 1, {w1}, {1.0}, {d1});
  model->set_deterministic(0, 2, {w2}, {1.0}, {d2});
  InstanceSpec spec;
  spec.capacities = {capacity};
  spec.arrival_probs = {1.0, 0.0};
  spec.null_type = 1;
  spec.null_action = 0;
  spec.outcomes = std::move(model);
  return build_instance(std::move(spec));
}

Instance gap_instance(int d) {
  if (d < 2 || d % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "the gap instance needs an even d >= 2");
  return two_action_instance(d / 2.0, 0.75, d / 2, 1.0, d);
}

RandomTabularParams tiny_params() { return RandomTabularParams{}; }

RandomTabularParams small_params() {
  RandomTabularParams p;
  p.n_rewards = 2;
  p.n_resources = 2;
  p.n_types = 3;
  p.n_actions = 3;
  p.max_support = 3;
  p.max_duration = 5;
  p.max_capacity = 4;
  return p;
}

namespace {

// `parts` positive integers summing to `total`, uniformly among compositions.
std::vector<int> random_composition(Rng& rng, int total, std::size_t parts) {
  std::vector<int> cuts;
  for (int c = 1; c < total; ++c) cuts.push_back(c);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(parts - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> out;
  int prev = 0;
  for (int c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(total - prev);
  return out;
}

double grid_value(Rng& rng, double max, double grid) {
  const int steps = static_cast<int>(std::floor(max / grid + 1e-9));
  return grid * std::uniform_int_distribution<int>(0, steps)(rng);
}

}  // namespace

Instance random_tabular_instance(const RandomTabularParams& params, Rng& rng) {
  if (params.n_types < 1 || params.n_actions < 1 || params.max_support < 1 || params.max_support > 7 ||
      params.max_duration < 1 || params.max_capacity < 1)
    throw Error(ErrorCode::kInvalidArgument, "invalid random instance parameters");
  const std::size_t J = params.n_types + 1, K = params.n_actions + 1;
  const std::size_t nr = params.n_rewards, nc = params.n_resources;
  auto model = std::make_shared<TabularOutcomeModel>(nr, nc, J, K);
  constexpr int kUnits = 8;  // probabilities are multiples of 1/8
  for (TypeIndex j = 0; j + 1 < J; ++j)
    for (ActionIndex k = 1; k < K; ++k) {
      const auto size = std::uniform_int_distribution<std::size_t>(1, params.max_support)(rng);
      std::vector<SupportPoint> support;
      for (int units : random_composition(rng, kUnits, size)) {
        SupportPoint pt;
        pt.probability = static_cast<double>(units) / kUnits;
        for (std::size_t i = 0; i < nr; ++i) pt.rewards.push_back(grid_value(rng, params.max_reward, params.grid));
        for (std::size_t i = 0; i < nc; ++i) {
          pt.allocations.push_back(grid_value(rng, params.max_allocation, params.grid));
          pt.durations.push_back(std::uniform_int_distribution<int>(1, params.max_duration)(rng));
        }
        support.push_back(std::move(pt));
      }
      model->set_distribution(j, k, std::move(support));
    }
  InstanceSpec spec;
  for (std::size_t i = 0; i < nc; ++i)
    spec.capacities.push_back(std::uniform_int_distribution<int>(1, params.max_capacity)(rng));
  for (int units : random_composition(rng, kUnits, params.n_types))
    spec.arrival_probs.push_back(static_cast<double>(units) / kUnits);
  spec.arrival_probs.push_back(0.0);
  spec.null_type = J - 1;
  spec.null_action = 0;
  spec.outcomes = std::move(model);
  return build_instance(std::move(spec));
}

// ---------------------------------------------------------------------------
// Synthetic assortment instances

namespace {

constexpr std::uint64_t kProductStream = 10;
constexpr std::uint64_t kCustomerStreamBase = 1'000;

}  // namespace

Instance SyntheticInstance::instance(double xi) const {
  if (!(xi > 0.0 && xi <= 1.0)) throw Error(ErrorCode::kConfigError, fmt::format("xi {} outside (0, 1]", xi));
  return build_mnl_instance(outcomes, customer_probs,
                            std::vector<double>(mnl->num_products(), 1.0 / xi));
}

SyntheticInstance generate_synthetic_instance(const SyntheticParams& params, std::uint64_t seed) {
  if (params.n_resources < 1 || params.n_resources > 63 || params.n_types < 1 || params.feature_dim < 1 ||
      params.max_assortment < 1 || params.duration_cap < 1 || params.duration_support < 1 ||
      !(params.price_min >= 0.0 && params.price_max >= params.price_min))
    throw Error(ErrorCode::kConfigError, "invalid synthetic instance parameters");
  const std::size_t m = params.n_resources, dim = params.feature_dim;

  Rng prod = make_stream(seed, kProductStream);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<std::vector<double>> f(m, std::vector<double>(dim));
  std::vector<double> prices(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& x : f[i]) x = unit(prod) * norm;
    prices[i] = std::uniform_real_distribution<double>(params.price_min, params.price_max)(prod);
  }

  std::vector<std::vector<std::vector<double>>> b(params.n_types);
  std::vector<std::vector<DurationDistribution>> durations(params.n_types);
  std::uniform_real_distribution<double> taste(-params.utility_scale, params.utility_scale);
  std::uniform_int_distribution<int> length(1, params.duration_cap);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  for (std::size_t j = 0; j < params.n_types; ++j) {
    Rng cust = make_stream(seed, kCustomerStreamBase + j);
    b[j].assign(m, std::vector<double>(dim));
    durations[j].resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (auto& x : b[j][i]) x = taste(cust);
      DurationDistribution& d = durations[j][i];
      double total = 0.0;
      for (std::size_t a = 0; a < params.duration_support; ++a) {
        d.values.push_back(length(cust));
        d.probs.push_back(0.05 + weight(cust));
        total += d.probs.back();
      }
      for (auto& p : d.probs) p /= total;
    }
  }

  SyntheticInstance out;
  out.kpi.sigma = params.sigma;
  out.kpi.max_assortment = params.max_assortment;
  for (std::size_t i = 0; i < m; ++i) out.kpi.category.push_back(i < (m + 1) / 2 ? 1 : 2);
  auto mnl = std::make_shared<MnlModel>(std::move(f), std::move(b), std::move(prices), std::move(durations));
  out.outcomes = std::make_shared<MnlOutcomeModel>(mnl, out.kpi);
  out.mnl = std::move(mnl);
  out.customer_probs.assign(params.n_types, 1.0 / static_cast<double>(params.n_types));
  return out;
}

}  // namespace rra
