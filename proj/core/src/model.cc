#include "rra/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rra {

namespace {

constexpr double kProbTol = 1e-12;

void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
  return Rng(seq);
}

EpisodeStreams EpisodeStreams::from_seed(std::uint64_t seed) {
  return EpisodeStreams{make_stream(seed, 1), make_stream(seed, 2), make_stream(seed, 3)};
}

void Outcome::clear() {
  std::fill(rewards.begin(), rewards.end(), 0.0);
  std::fill(allocations.begin(), allocations.end(), 0.0);
  std::fill(durations.begin(), durations.end(), 0);
}

bool Outcome::is_zero() const {
  return std::all_of(rewards.begin(), rewards.end(), [](double x) { return x == 0.0; }) &&
         std::all_of(allocations.begin(), allocations.end(),
                     [](double x) { return x == 0.0; }) &&
         std::all_of(durations.begin(), durations.end(), [](int d) { return d == 0; });
}

double OutcomeModel::max_mean_volume() const {
  std::vector<double> w(num_rewards()), v(num_resources());
  double best = 0.0;
  for (TypeIndex j = 0; j < num_types(); ++j) {
    for (ActionIndex k = 0; k < num_actions(); ++k) {
      mean_outcome(j, k, w, v);
      for (double x : v) best = std::max(best, x);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// TabularOutcomeModel

TabularOutcomeModel::TabularOutcomeModel(std::size_t n_rewards, std::size_t n_resources,
                                         std::size_t n_types, std::size_t n_actions)
    : n_rewards_(n_rewards),
      n_resources_(n_resources),
      n_types_(n_types),
      n_actions_(n_actions),
      cells_(n_types * n_actions) {
  require(n_rewards > 0 && n_resources > 0 && n_types > 0 && n_actions > 0,
          ErrorCode::kInvalidArgument, "outcome model dimensions must be positive");
  for (auto& cell : cells_) recompute(cell);
}

std::size_t TabularOutcomeModel::index(TypeIndex j, ActionIndex k) const {
  require(j < n_types_, ErrorCode::kIndexOutOfRange, "type index " + std::to_string(j));
  require(k < n_actions_, ErrorCode::kIndexOutOfRange, "action index " + std::to_string(k));
  return j * n_actions_ + k;
}

void TabularOutcomeModel::set_distribution(TypeIndex j, ActionIndex k,
                                           std::vector<SupportPoint> support) {
  Cell& cell = cells_[index(j, k)];
  double total = 0.0;
  for (const auto& pt : support) {
    require(pt.rewards.size() == n_rewards_ && pt.allocations.size() == n_resources_ &&
                pt.durations.size() == n_resources_,
            ErrorCode::kDimensionMismatch, "support point has wrong vector lengths");
    require(pt.probability >= 0.0 && std::isfinite(pt.probability),
            ErrorCode::kMalformedProbabilities, "negative support probability");
    for (double w : pt.rewards)
      require(w >= 0.0 && std::isfinite(w), ErrorCode::kInvalidArgument, "reward must be >= 0");
    for (double a : pt.allocations)
      require(a >= 0.0 && std::isfinite(a), ErrorCode::kInvalidArgument,
              "allocation must be >= 0");
    for (int d : pt.durations) require(d >= 0, ErrorCode::kInvalidArgument, "duration < 0");
    total += pt.probability;
  }
  require(support.empty() || std::abs(total - 1.0) <= 1e-9, ErrorCode::kMalformedProbabilities,
          "outcome probabilities sum to " + std::to_string(total));
  cell.support = std::move(support);
  recompute(cell);
}

void TabularOutcomeModel::set_deterministic(TypeIndex j, ActionIndex k,
                                            std::vector<double> rewards,
                                            std::vector<double> allocations,
                                            std::vector<int> durations) {
  std::vector<SupportPoint> s(1);
  s[0].probability = 1.0;
  s[0].rewards = std::move(rewards);
  s[0].allocations = std::move(allocations);
  s[0].durations = std::move(durations);
  set_distribution(j, k, std::move(s));
}

void TabularOutcomeModel::clear_distribution(TypeIndex j, ActionIndex k) {
  Cell& cell = cells_[index(j, k)];
  cell.support.clear();
  recompute(cell);
}

const std::vector<SupportPoint>& TabularOutcomeModel::support(TypeIndex j, ActionIndex k) const {
  return cells_[index(j, k)].support;
}

void TabularOutcomeModel::declare_bounds(std::optional<double> w_max, std::optional<double> a_max,
                                         std::optional<int> d_max) {
  declared_w_max_ = w_max;
  declared_a_max_ = a_max;
  declared_d_max_ = d_max;
}

void TabularOutcomeModel::recompute(Cell& cell) const {
  cell.mean_reward.assign(n_rewards_, 0.0);
  cell.mean_volume.assign(n_resources_, 0.0);
  cell.mean_alloc.assign(n_resources_, 0.0);
  cell.mean_duration.assign(n_resources_, 0.0);
  cell.cumulative.clear();
  double acc = 0.0;
  for (const auto& pt : cell.support) {
    for (std::size_t i = 0; i < n_rewards_; ++i) cell.mean_reward[i] += pt.probability * pt.rewards[i];
    for (std::size_t i = 0; i < n_resources_; ++i) {
      cell.mean_volume[i] += pt.probability * pt.allocations[i] * pt.durations[i];
      cell.mean_alloc[i] += pt.probability * pt.allocations[i];
      cell.mean_duration[i] += pt.probability * pt.durations[i];
    }
    acc += pt.probability;
    cell.cumulative.push_back(acc);
  }
}

void TabularOutcomeModel::mean_outcome(TypeIndex j, ActionIndex k, std::span<double> reward,
                                       std::span<double> volume) const {
  const Cell& cell = cells_[index(j, k)];
  std::copy(cell.mean_reward.begin(), cell.mean_reward.end(), reward.begin());
  std::copy(cell.mean_volume.begin(), cell.mean_volume.end(), volume.begin());
}

void TabularOutcomeModel::mean_allocation(TypeIndex j, ActionIndex k, std::span<double> alloc,
                                          std::span<double> duration) const {
  const Cell& cell = cells_[index(j, k)];
  std::copy(cell.mean_alloc.begin(), cell.mean_alloc.end(), alloc.begin());
  std::copy(cell.mean_duration.begin(), cell.mean_duration.end(), duration.begin());
}

void TabularOutcomeModel::mean_tail(TypeIndex j, ActionIndex k, int horizon,
                                    std::span<double> out) const {
  const Cell& cell = cells_[index(j, k)];
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& pt : cell.support) {
    for (std::size_t i = 0; i < n_resources_; ++i) {
      const int upto = std::min(pt.durations[i], horizon);
      for (int s = 1; s <= upto; ++s) out[i * horizon + (s - 1)] += pt.probability * pt.allocations[i];
    }
  }
}

void TabularOutcomeModel::sample(Rng& rng, TypeIndex j, ActionIndex k, Outcome& out) const {
  const Cell& cell = cells_[index(j, k)];
  out.rewards.assign(n_rewards_, 0.0);
  out.allocations.assign(n_resources_, 0.0);
  out.durations.assign(n_resources_, 0);
  if (cell.support.empty()) return;
  std::size_t idx = 0;
  if (cell.support.size() > 1) {
    const double u = std::uniform_real_distribution<double>(0.0, cell.cumulative.back())(rng);
    idx = static_cast<std::size_t>(
        std::upper_bound(cell.cumulative.begin(), cell.cumulative.end(), u) -
        cell.cumulative.begin());
    idx = std::min(idx, cell.support.size() - 1);
  }
  const SupportPoint& pt = cell.support[idx];
  out.rewards = pt.rewards;
  out.allocations = pt.allocations;
  out.durations = pt.durations;
}

SupportBounds TabularOutcomeModel::support_bounds() const {
  SupportBounds b;
  for (const auto& cell : cells_) {
    for (const auto& pt : cell.support) {
      if (pt.probability <= 0.0) continue;
      for (double w : pt.rewards) b.w_max = std::max(b.w_max, w);
      for (double a : pt.allocations) b.a_max = std::max(b.a_max, a);
      for (int d : pt.durations) b.d_max = std::max(b.d_max, d);
    }
  }
  if (declared_w_max_) b.w_max = std::max(b.w_max, *declared_w_max_);
  if (declared_a_max_) b.a_max = std::max(b.a_max, *declared_a_max_);
  if (declared_d_max_) b.d_max = std::max(b.d_max, *declared_d_max_);
  return b;
}

double TabularOutcomeModel::max_mean_volume() const {
  double best = 0.0;
  for (const auto& cell : cells_)
    for (double v : cell.mean_volume) best = std::max(best, v);
  return best;
}

// ---------------------------------------------------------------------------
// Instance

Instance build_instance(InstanceSpec spec) {
  require(spec.outcomes != nullptr, ErrorCode::kInvalidArgument, "instance has no outcome model");
  const OutcomeModel& om = *spec.outcomes;

  require(spec.capacities.size() == om.num_resources(), ErrorCode::kDimensionMismatch,
          "capacities length differs from resource count");
  for (double c : spec.capacities)
    require(c > 0.0 && std::isfinite(c), ErrorCode::kNonpositiveCapacity,
            "capacity " + std::to_string(c) + " is not strictly positive");

  require(spec.arrival_probs.size() == om.num_types(), ErrorCode::kDimensionMismatch,
          "arrival_probs length differs from type count");
  double total = 0.0;
  for (double p : spec.arrival_probs) {
    require(p >= 0.0 && std::isfinite(p), ErrorCode::kMalformedProbabilities,
            "negative arrival probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= kProbTol, ErrorCode::kMalformedProbabilities,
          "arrival probabilities sum to " + std::to_string(total));

  require(spec.null_type.has_value(), ErrorCode::kMissingNullType, "null type is mandatory");
  require(spec.null_action.has_value(), ErrorCode::kMissingNullAction,
          "null action is mandatory");
  require(*spec.null_type < om.num_types(), ErrorCode::kIndexOutOfRange, "null type index");
  require(*spec.null_action < om.num_actions(), ErrorCode::kIndexOutOfRange,
          "null action index");

  if (auto* tab = dynamic_cast<const TabularOutcomeModel*>(spec.outcomes.get())) {
    // Force null outcomes to zero by rejecting any nonzero atom.
    auto zero_cell = [&](TypeIndex j, ActionIndex k) {
      for (const auto& pt : tab->support(j, k)) {
        if (pt.probability == 0.0) continue;
        const bool zero =
            std::all_of(pt.rewards.begin(), pt.rewards.end(), [](double x) { return x == 0; }) &&
            std::all_of(pt.allocations.begin(), pt.allocations.end(),
                        [](double x) { return x == 0; }) &&
            std::all_of(pt.durations.begin(), pt.durations.end(), [](int x) { return x == 0; });
        if (!zero) return false;
      }
      return true;
    };
    for (ActionIndex k = 0; k < om.num_actions(); ++k)
      require(zero_cell(*spec.null_type, k), ErrorCode::kInvalidArgument,
              "null type must produce zero outcomes");
    for (TypeIndex j = 0; j < om.num_types(); ++j)
      require(zero_cell(j, *spec.null_action), ErrorCode::kInvalidArgument,
              "null action must produce zero outcomes");
  }

  const SupportBounds sb = om.support_bounds();
  require(sb.d_max >= 0 && sb.a_max >= 0.0 && sb.w_max >= 0.0, ErrorCode::kInvalidArgument,
          "support bounds must be nonnegative");

  Instance inst;
  inst.capacities_ = std::move(spec.capacities);
  inst.arrival_probs_ = std::move(spec.arrival_probs);
  inst.null_type_ = *spec.null_type;
  inst.null_action_ = *spec.null_action;
  inst.outcomes_ = std::move(spec.outcomes);
  inst.horizon_hint_ = spec.horizon_hint;
  return inst;
}

Instance Instance::with_capacities(std::vector<double> capacities) const {
  InstanceSpec s{std::move(capacities), arrival_probs_, null_type_, null_action_, outcomes_,
                 horizon_hint_};
  return build_instance(std::move(s));
}

Instance Instance::with_arrival_probs(std::vector<double> probs) const {
  InstanceSpec s{capacities_, std::move(probs), null_type_, null_action_, outcomes_,
                 horizon_hint_};
  return build_instance(std::move(s));
}

TypeIndex sample_arrival(Rng& rng, std::span<const double> p) {
  ArrivalSampler s(p);
  return s(rng);
}

ArrivalSampler::ArrivalSampler(std::span<const double> p) : dist_(p.begin(), p.end()) {}

Outcome sample_outcome(const Instance& instance, Rng& rng, TypeIndex j, ActionIndex k) {
  require(j < instance.num_types(), ErrorCode::kIndexOutOfRange, "type index");
  require(k < instance.num_actions(), ErrorCode::kIndexOutOfRange, "action index");
  Outcome out(instance.num_rewards(), instance.num_resources());
  if (j == instance.null_type() || k == instance.null_action()) return out;
  instance.outcomes().sample(rng, j, k, out);
  return out;
}

std::vector<MeanOutcome> mean_outcomes_for_type(const Instance& instance, TypeIndex j) {
  require(j < instance.num_types(), ErrorCode::kIndexOutOfRange, "type index");
  std::vector<MeanOutcome> out(instance.num_actions());
  for (ActionIndex k = 0; k < instance.num_actions(); ++k) {
    out[k].reward.assign(instance.num_rewards(), 0.0);
    out[k].volume.assign(instance.num_resources(), 0.0);
    if (j == instance.null_type() || k == instance.null_action()) continue;
    instance.outcomes().mean_outcome(j, k, out[k].reward, out[k].volume);
  }
  return out;
}

Bounds make_bounds(double w_max, double a_max, int d_max, double v_max, double c_min,
                   std::size_t n_resources) {
  Bounds b;
  b.w_max = w_max;
  b.a_max = a_max;
  b.d_max = d_max;
  b.v_max = v_max;
  b.gamma = std::max(w_max, v_max);
  b.c_min = c_min;
  b.xi = a_max / c_min;
  b.n_resources = n_resources;
  b.assumption_value =
      b.xi > 0.0 ? b.xi * std::log(static_cast<double>(n_resources) / b.xi) : 0.0;
  b.assumption_holds = b.assumption_value <= 1.0;
  return b;
}

Bounds compute_bounds(const Instance& instance) {
  const SupportBounds sb = instance.outcomes().support_bounds();
  const double c_min =
      *std::min_element(instance.capacities().begin(), instance.capacities().end());
  return make_bounds(sb.w_max, sb.a_max, sb.d_max, instance.outcomes().max_mean_volume(), c_min,
                     instance.num_resources());
}

}  // namespace rra
