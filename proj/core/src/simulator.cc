#include "rra/simulator.h"

#include <fmt/format.h>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace rra {

OccupancyLedger::OccupancyLedger(std::size_t n_resources)
    : n_resources_(n_resources), occupied_(n_resources, 0.0) {}

void OccupancyLedger::advance_to(TimeStep t) {
  if (t < now_) throw Error(ErrorCode::kInvalidArgument, "ledger clock cannot go backwards");
  now_ = t;
  bool released = false;
  while (!releases_.empty() && releases_.begin()->first <= now_) {
    releases_.erase(releases_.begin());
    released = true;
  }
  if (released) recompute();
}

void OccupancyLedger::allocate(std::span<const double> allocations,
                               std::span<const int> durations) {
  bool changed = false;
  for (std::size_t i = 0; i < n_resources_; ++i) {
    if (allocations[i] == 0.0 || durations[i] <= 0) continue;
    auto& slot = releases_[now_ + durations[i]];
    if (slot.empty()) slot.assign(n_resources_, 0.0);
    slot[i] += allocations[i];
    changed = true;
  }
  if (changed) recompute();
}

// Summing in release order every time keeps the ledger a pure function of
// the outstanding allocations, so replays reproduce it bit for bit.
void OccupancyLedger::recompute() {
  std::fill(occupied_.begin(), occupied_.end(), 0.0);
  for (const auto& [when, units] : releases_)
    for (std::size_t i = 0; i < n_resources_; ++i) occupied_[i] += units[i];
}

bool feasibility_gate(const OccupancyLedger& ledger, std::span<const double> capacities,
                      double a_max) {
  for (std::size_t i = 0; i < ledger.num_resources(); ++i)
    if (!(ledger.occupied(i) + a_max <= capacities[i])) return false;
  return true;
}

void Policy::observe(const Arrival&, ActionIndex, const Outcome&) {}

Simulator::Simulator(const Instance& instance, double a_max)
    : instance_(&instance),
      a_max_(a_max),
      ledger_(instance.num_resources()),
      cum_(instance.num_rewards(), 0.0) {}

void Simulator::prepare_step() { ledger_.advance_to(next_t_); }

bool Simulator::gate_open() {
  prepare_step();
  return feasibility_gate(ledger_, instance_->capacities(), a_max_);
}

StepRecord Simulator::step(TypeIndex type, ActionIndex action, Rng& outcome_rng) {
  prepare_step();
  const Instance& inst = *instance_;
  if (action >= inst.num_actions())
    throw Error(ErrorCode::kIndexOutOfRange, "action index " + std::to_string(action));
  if (type >= inst.num_types())
    throw Error(ErrorCode::kIndexOutOfRange, "type index " + std::to_string(type));

  StepRecord rec;
  rec.t = next_t_;
  rec.arrival_type = type;
  rec.proposed = action;
  rec.action = action;
  if (action != inst.null_action() && !bypass_gate_ && !gate_open()) rec.action = inst.null_action();

  rec.outcome = sample_outcome(inst, outcome_rng, type, rec.action);

  const auto& cap = inst.capacities();
  for (std::size_t i = 0; i < inst.num_resources(); ++i) {
    if (rec.outcome.durations[i] <= 0) continue;
    if (!(ledger_.occupied(i) + rec.outcome.allocations[i] <= cap[i]))
      throw Error(ErrorCode::kConstraintViolation,
                  fmt::format("step {} would occupy {} > capacity {} on resource {}", rec.t,
                              ledger_.occupied(i) + rec.outcome.allocations[i], cap[i], i));
  }
  ledger_.allocate(rec.outcome.allocations, rec.outcome.durations);
  for (std::size_t i = 0; i < cum_.size(); ++i) cum_[i] += rec.outcome.rewards[i];
  rec.occupied = ledger_.occupied_now();
  rec.cum_rewards = cum_;
  ++next_t_;
  return rec;
}

Trajectory run_episode(const Instance& instance, Policy& policy, TimeStep horizon,
                       EpisodeStreams& streams, std::optional<double> a_max, bool bypass_gate) {
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  const double amax = a_max ? *a_max : instance.outcomes().support_bounds().a_max;
  Simulator sim(instance, amax);
  sim.set_bypass_gate(bypass_gate);
  ArrivalSampler arrivals(instance.arrival_probs());

  Trajectory traj;
  traj.n_rewards = instance.num_rewards();
  traj.n_resources = instance.num_resources();
  traj.steps.reserve(static_cast<std::size_t>(horizon));
  for (TimeStep t = 1; t <= horizon; ++t) {
    const Arrival arrival{t, arrivals(streams.arrivals)};
    const ActionIndex proposed = policy.propose(arrival, streams.policy);
    StepRecord rec = sim.step(arrival.type, proposed, streams.outcomes);
    policy.observe(arrival, rec.action, rec.outcome);
    traj.steps.push_back(std::move(rec));
  }
  return traj;
}

Trajectory run_episode(const Instance& instance, Policy& policy, const EpisodeOptions& options) {
  EpisodeStreams streams = EpisodeStreams::from_seed(options.seed);
  return run_episode(instance, policy, options.horizon, streams, options.a_max,
                     options.bypass_gate);
}

std::vector<std::vector<double>> recompute_occupancy(const Trajectory& trajectory) {
  const std::size_t T = trajectory.steps.size();
  const std::size_t m = trajectory.n_resources;
  std::vector<std::vector<double>> occ(T, std::vector<double>(m, 0.0));
  for (std::size_t s = 0; s < T; ++s) {
    const Outcome& o = trajectory.steps[s].outcome;
    for (std::size_t i = 0; i < m; ++i) {
      const int d = o.durations[i];
      if (d <= 0 || o.allocations[i] == 0.0) continue;
      for (std::size_t u = s; u < std::min(T, s + static_cast<std::size_t>(d)); ++u)
        occ[u][i] += o.allocations[i];
    }
  }
  return occ;
}

std::size_t count_capacity_violations(const Trajectory& trajectory,
                                      std::span<const double> capacities) {
  const auto occ = recompute_occupancy(trajectory);
  std::size_t violations = 0;
  for (const auto& row : occ)
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i] > capacities[i]) ++violations;
  return violations;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  std::string header = "t,arrival_type,action";
  for (std::size_t i = 1; i <= traj.n_rewards; ++i) header += fmt::format(",W_{}", i);
  for (std::size_t i = 1; i <= traj.n_resources; ++i) header += fmt::format(",occupied_{}", i);
  for (std::size_t i = 1; i <= traj.n_rewards; ++i) header += fmt::format(",cum_W_{}", i);
  out << header << '\n';
  std::string line;
  for (const auto& rec : traj.steps) {
    line = fmt::format("{},{},{}", rec.t, rec.arrival_type, rec.action);
    for (double w : rec.outcome.rewards) line += fmt::format(",{}", w);
    for (double o : rec.occupied) line += fmt::format(",{}", o);
    for (double c : rec.cum_rewards) line += fmt::format(",{}", c);
    out << line << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in, std::size_t n_rewards, std::size_t n_resources) {
  Trajectory traj;
  traj.n_rewards = n_rewards;
  traj.n_resources = n_resources;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIoError, "empty trajectory csv");
  const std::size_t expected = 3 + 2 * n_rewards + n_resources;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != expected)
      throw Error(ErrorCode::kIoError, "trajectory csv row has " + std::to_string(cells.size()) +
                                           " cells, expected " + std::to_string(expected));
    StepRecord rec;
    std::size_t c = 0;
    rec.t = std::stoll(cells[c++]);
    rec.arrival_type = std::stoull(cells[c++]);
    rec.action = std::stoull(cells[c++]);
    rec.proposed = rec.action;
    rec.outcome = Outcome(n_rewards, n_resources);
    for (std::size_t i = 0; i < n_rewards; ++i) rec.outcome.rewards[i] = std::stod(cells[c++]);
    rec.occupied.resize(n_resources);
    for (std::size_t i = 0; i < n_resources; ++i) rec.occupied[i] = std::stod(cells[c++]);
    rec.cum_rewards.resize(n_rewards);
    for (std::size_t i = 0; i < n_rewards; ++i) rec.cum_rewards[i] = std::stod(cells[c++]);
    traj.steps.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace rra
