#include <gtest/gtest.h>

#include <sstream>

#include "frozen_values.h"
#include "rra/policy.h"
#include "rra/random_instance.h"
#include "rra/simulator.h"

namespace rra {
namespace {

TEST(Ledger, AllocationOccupiesItsDuration) {
  OccupancyLedger ledger(1);
  ledger.advance_to(1);
  const std::vector<double> a{2.0};
  const std::vector<int> d{3};
  ledger.allocate(a, d);
  for (TimeStep t = 1; t <= 3; ++t) {
    ledger.advance_to(t);
    EXPECT_DOUBLE_EQ(ledger.occupied(0), 2.0) << "t = " << t;
  }
  ledger.advance_to(4);
  EXPECT_DOUBLE_EQ(ledger.occupied(0), 0.0);
}

TEST(Ledger, EmptyLedgerIsZero) {
  OccupancyLedger ledger(2);
  ledger.advance_to(5);
  EXPECT_EQ(ledger.occupied(0), 0.0);
  EXPECT_EQ(ledger.occupied(1), 0.0);
}

TEST(Ledger, BackToBackUnitDurations) {
  OccupancyLedger ledger(1);
  const std::vector<double> a{1.0};
  const std::vector<int> d{1};
  ledger.advance_to(1);
  ledger.allocate(a, d);
  EXPECT_DOUBLE_EQ(ledger.occupied(0), 1.0);
  ledger.advance_to(2);
  ledger.allocate(a, d);
  EXPECT_DOUBLE_EQ(ledger.occupied(0), 1.0);
  ledger.advance_to(3);
  EXPECT_DOUBLE_EQ(ledger.occupied(0), 0.0);
}

TEST(Ledger, ClockCannotGoBackwards) {
  OccupancyLedger ledger(1);
  ledger.advance_to(3);
  EXPECT_THROW(ledger.advance_to(2), Error);
}

TEST(Gate, EmptyLedgerPasses) {
  OccupancyLedger ledger(2);
  const std::vector<double> c{1.0, 3.0};
  EXPECT_TRUE(feasibility_gate(ledger, c, 1.0));
}

TEST(Gate, ThresholdIsInclusive) {
  const std::vector<double> c{4.0};
  const std::vector<int> d{10};
  OccupancyLedger at_boundary(1);
  at_boundary.advance_to(1);
  at_boundary.allocate(std::vector<double>{3.0}, d);
  EXPECT_TRUE(feasibility_gate(at_boundary, c, 1.0));

  OccupancyLedger over(1);
  over.advance_to(1);
  over.allocate(std::vector<double>{3.5}, d);
  EXPECT_FALSE(feasibility_gate(over, c, 1.0));
}

TEST(Step, NullActionChangesNothing) {
  const Instance inst = gap_instance(8);
  Simulator sim(inst, 1.0);
  Rng rng = make_stream(1, 0);
  const StepRecord r = sim.step(0, inst.null_action(), rng);
  EXPECT_TRUE(r.outcome.is_zero());
  EXPECT_EQ(r.occupied[0], 0.0);
}

TEST(Step, GapActionOccupiesForDSteps) {
  const Instance inst = gap_instance(8);
  Simulator sim(inst, 1.0);
  Rng rng = make_stream(1, 0);
  sim.step(0, 2, rng);
  for (int t = 2; t <= 8; ++t) {
    const StepRecord r = sim.step(0, inst.null_action(), rng);
    EXPECT_DOUBLE_EQ(r.occupied[0], 1.0) << "t = " << t;
  }
  EXPECT_DOUBLE_EQ(sim.step(0, inst.null_action(), rng).occupied[0], 0.0);
}

TEST(Step, BypassedGateHitsTheDefensiveCheck) {
  const Instance inst = two_action_instance(1.0, 1.0, 5, 1.0, 5);
  Simulator sim(inst, 1.0);
  sim.set_bypass_gate(true);
  Rng rng = make_stream(1, 0);
  sim.step(0, 1, rng);
  try {
    sim.step(0, 1, rng);
    FAIL() << "expected a constraint violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstraintViolation);
  }
}

TEST(RunEpisode, NullPolicyEarnsNothing) {
  const Instance inst = gap_instance(8);
  NullPolicy policy(inst.null_action());
  const Trajectory traj = run_episode(inst, policy, EpisodeOptions{50, 3});
  for (const auto& s : traj.steps) {
    EXPECT_EQ(s.cum_rewards[0], 0.0);
    EXPECT_EQ(s.occupied[0], 0.0);
  }
}

TEST(RunEpisode, AlwaysLongActionOnGapInstance) {
  // c = 4 and a_max = 1: each step sees occupancy t - 1 <= 3, so all four
  // proposals of the d = 8 action pass the gate.
  const Instance inst = gap_instance(8);
  FixedActionPolicy policy(2);
  const Trajectory traj = run_episode(inst, policy, EpisodeOptions{4, 1});
  EXPECT_DOUBLE_EQ(traj.steps.back().cum_rewards[0], frozen::kGapAlwaysK2Reward);
  EXPECT_DOUBLE_EQ(traj.steps.back().occupied[0], 4.0);
}

TEST(RunEpisode, AlwaysShortActionOnGapInstance) {
  const Instance inst = gap_instance(8);
  FixedActionPolicy policy(1);
  const Trajectory traj = run_episode(inst, policy, EpisodeOptions{4, 1});
  EXPECT_DOUBLE_EQ(traj.steps.back().cum_rewards[0], frozen::kGapAlwaysK1Reward);
  for (TimeStep t = 1; t <= 4; ++t) EXPECT_DOUBLE_EQ(traj.steps[t - 1].occupied[0], static_cast<double>(t));
}

TEST(RunEpisode, GateBlocksOnceFull) {
  const Instance inst = gap_instance(8);
  FixedActionPolicy policy(2);
  const Trajectory traj = run_episode(inst, policy, EpisodeOptions{8, 1});
  for (TimeStep t = 5; t <= 8; ++t) EXPECT_EQ(traj.steps[t - 1].action, inst.null_action());
  EXPECT_EQ(count_capacity_violations(traj, inst.capacities()), 0u);
}

TEST(RunEpisode, SameSeedSameTrajectory) {
  Rng gen = make_stream(5, 0);
  const Instance inst = random_tabular_instance(small_params(), gen);
  FixedActionPolicy a(1), b(1);
  const Trajectory x = run_episode(inst, a, EpisodeOptions{200, 9});
  const Trajectory y = run_episode(inst, b, EpisodeOptions{200, 9});
  for (std::size_t t = 0; t < x.steps.size(); ++t) {
    EXPECT_EQ(x.steps[t].arrival_type, y.steps[t].arrival_type);
    EXPECT_EQ(x.steps[t].cum_rewards, y.steps[t].cum_rewards);
  }
}

TEST(RunEpisode, RecomputedOccupancyMatchesLedger) {
  Rng gen = make_stream(8, 0);
  const Instance inst = random_tabular_instance(small_params(), gen);
  FixedActionPolicy policy(2);
  const Trajectory traj = run_episode(inst, policy, EpisodeOptions{300, 4});
  const auto occ = recompute_occupancy(traj);
  for (std::size_t t = 0; t < traj.steps.size(); ++t)
    for (std::size_t i = 0; i < inst.num_resources(); ++i)
      EXPECT_NEAR(occ[t][i], traj.steps[t].occupied[i], 1e-12);
  EXPECT_EQ(count_capacity_violations(traj, inst.capacities()), 0u);
}

TEST(TrajectoryCsv, RoundTrip) {
  Rng gen = make_stream(2, 0);
  const Instance inst = random_tabular_instance(small_params(), gen);
  FixedActionPolicy policy(1);
  const Trajectory traj = run_episode(inst, policy, EpisodeOptions{40, 2});
  std::stringstream buf;
  write_trajectory_csv(traj, buf);
  const Trajectory back = read_trajectory_csv(buf, inst.num_rewards(), inst.num_resources());
  ASSERT_EQ(back.steps.size(), traj.steps.size());
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    EXPECT_EQ(back.steps[t].t, traj.steps[t].t);
    EXPECT_EQ(back.steps[t].arrival_type, traj.steps[t].arrival_type);
    EXPECT_EQ(back.steps[t].action, traj.steps[t].action);
    for (std::size_t i = 0; i < inst.num_rewards(); ++i) {
      EXPECT_DOUBLE_EQ(back.steps[t].outcome.rewards[i], traj.steps[t].outcome.rewards[i]);
      EXPECT_DOUBLE_EQ(back.steps[t].cum_rewards[i], traj.steps[t].cum_rewards[i]);
    }
    for (std::size_t i = 0; i < inst.num_resources(); ++i)
      EXPECT_DOUBLE_EQ(back.steps[t].occupied[i], traj.steps[t].occupied[i]);
  }
}

}  // namespace
}  // namespace rra
