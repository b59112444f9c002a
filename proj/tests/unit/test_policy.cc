#include <gtest/gtest.h>

#include <cmath>

#include "frozen_values.h"
#include "rra/policy.h"
#include "rra/random_instance.h"

namespace rra {
namespace {

class AlwaysAction final : public KappaOracle {
 public:
  explicit AlwaysAction(ActionIndex k) : k_(k) {}
  ActionIndex best_action(const WeightVector&, TypeIndex) const override { return k_; }

 private:
  ActionIndex k_;
};

PolicyContext context_with(const Instance& inst, ActionIndex fixed) {
  return PolicyContext::from_instance(inst, std::make_shared<AlwaysAction>(fixed));
}

TEST(PhaseSchedule, BoundariesDouble) {
  const PhaseSchedule s(4);
  EXPECT_EQ(s.tau(-1), 4);
  EXPECT_EQ(s.tau(0), 8);
  EXPECT_EQ(s.tau(1), 16);
  EXPECT_EQ(s.phase_of(1), -1);
  EXPECT_EQ(s.phase_of(4), -1);
  EXPECT_EQ(s.phase_of(5), 0);
  EXPECT_EQ(s.phase_of(8), 0);
  EXPECT_EQ(s.phase_of(9), 1);
  EXPECT_EQ(s.phase_begin(0), 5);
  EXPECT_EQ(s.phase_end(0), 8);
}

TEST(ErrorParams, DeviationTermValue) {
  const Bounds b = make_bounds(1.0, 1.0, 1, 1.0, 1.0, 2);
  const ErrorParams e = error_params_for_tau(1024.0, 0.1, b, 2, 2);
  EXPECT_NEAR(e.eps_d, frozen::kEpsDExample, 1e-12);
}

TEST(ErrorParams, RewardTermHalvesWhenTheWindowQuadruples) {
  const Bounds b = make_bounds(1.0, 1.0, 1, 1.0, 10.0, 2);
  const double e1 = error_params_for_tau(100.0, 0.1, b, 3, 2).eps_b;
  const double e4 = error_params_for_tau(400.0, 0.1, b, 3, 2).eps_b;
  EXPECT_NEAR(e4, 0.5 * e1, 1e-12);
}

TEST(ErrorParams, ConcentrationTermVanishesAsDeltaApproachesOne) {
  const Bounds b = make_bounds(1.0, 1.0, 1, 1.0, 10.0, 1);
  EXPECT_LT(error_params_for_tau(100.0, 1.0 - 1e-12, b, 1, 1).eps_c, 1e-5);
}

TEST(ErrorParams, RejectsDeltaOutsideTheOpenInterval) {
  const Bounds b = make_bounds(1.0, 1.0, 1, 1.0, 10.0, 1);
  for (double d : {0.0, 1.0, -0.5, 2.0}) {
    try {
      error_params_for_tau(100.0, d, b, 1, 1);
      FAIL() << "delta " << d;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidDelta);
    }
  }
}

TEST(LambdaHat, NullWindowIsZero) {
  const Instance inst = gap_instance(8);
  const InstanceMeanView view(inst);
  const EnumerationKappa oracle(std::make_shared<InstanceMeanView>(inst));
  const std::vector<TypeIndex> window(10, inst.null_type());
  EXPECT_NEAR(estimate_lambda_hat(window, view, inst.capacities(), oracle), 0.0, 1e-12);
}

TEST(LambdaHat, GapWindowMatchesSteadyState) {
  const Instance inst = gap_instance(8);
  const InstanceMeanView view(inst);
  const EnumerationKappa oracle(std::make_shared<InstanceMeanView>(inst));
  const std::vector<TypeIndex> window(10, 0);
  EXPECT_NEAR(estimate_lambda_hat(window, view, inst.capacities(), oracle), 0.75, 1e-12);
}

TEST(Imwu, WarmupThenSplitWindowsEvenDuration) {
  const Instance inst = two_action_instance(100.0, 1.0, 2, 1.0, 4);
  ImwuPolicy p(PolicyContext::from_instance(inst));
  Rng rng = make_stream(1, 2);
  for (TimeStep t = 1; t <= 4; ++t) {
    EXPECT_EQ(p.propose(Arrival{t, 0}, rng), 1u);
    EXPECT_EQ(p.current_phase(), -1);
  }
  p.propose(Arrival{5, 0}, rng);
  EXPECT_EQ(p.current_phase(), 0);
  EXPECT_EQ(p.mwu_window(), (std::pair<TimeStep, TimeStep>{1, 2}));
  EXPECT_EQ(p.estimate_window(), (std::pair<TimeStep, TimeStep>{3, 4}));
}

TEST(Imwu, OddDurationUsesTheFloorSplit) {
  const Instance inst = two_action_instance(100.0, 1.0, 1, 1.0, 3);
  ImwuPolicy p(PolicyContext::from_instance(inst));
  Rng rng = make_stream(1, 2);
  for (TimeStep t = 1; t <= 4; ++t) p.propose(Arrival{t, 0}, rng);
  EXPECT_EQ(p.current_phase(), 0);
  EXPECT_EQ(p.mwu_window(), (std::pair<TimeStep, TimeStep>{1, 1}));
  EXPECT_EQ(p.estimate_window(), (std::pair<TimeStep, TimeStep>{2, 3}));
}

TEST(Imwu, WindowsAreDisjointInEveryPhase) {
  const Instance inst = gap_instance(8);
  ImwuPolicy p(PolicyContext::from_instance(inst));
  Rng rng = make_stream(1, 2);
  int seen = -1;
  for (TimeStep t = 1; t <= 600; ++t) {
    p.propose(Arrival{t, 0}, rng);
    if (p.current_phase() != seen) {
      seen = p.current_phase();
      if (seen < 0) continue;
      const auto m = p.mwu_window();
      const auto e = p.estimate_window();
      EXPECT_LT(m.second, e.first);
      EXPECT_EQ(e.second, p.schedule().tau(seen - 1));
      EXPECT_EQ(static_cast<TimeStep>(p.theta().size()), m.second - m.first + 1);
    }
  }
}

TEST(Imwu, SingletonWeightSet) {
  const Instance inst = two_action_instance(100.0, 1.0, 1, 1.0, 2);
  ImwuPolicy p(PolicyContext::from_instance(inst));
  Rng rng = make_stream(1, 2);
  for (TimeStep t = 1; t <= 3; ++t) p.propose(Arrival{t, 0}, rng);
  ASSERT_EQ(p.current_phase(), 0);
  EXPECT_EQ(p.theta().size(), 1u);
}

TEST(Imwu, ZeroThinningAlwaysRejects) {
  const Instance inst = gap_instance(8);
  ImwuOptions opt;
  opt.thinning_override = 0.0;
  ImwuPolicy p(context_with(inst, 1), opt);
  Rng rng = make_stream(4, 2);
  for (TimeStep t = 1; t <= 200; ++t) {
    const ActionIndex k = p.propose(Arrival{t, 0}, rng);
    if (t > 8) EXPECT_EQ(k, inst.null_action());
  }
}

TEST(Imwu, ThinningPassRate) {
  const Instance inst = gap_instance(8);
  ImwuOptions opt;
  opt.thinning_override = 1.0 / 1.25;
  ImwuPolicy p(context_with(inst, 1), opt);
  Rng rng = make_stream(5, 2);
  int passed = 0;
  const int n = 10'000;
  for (TimeStep t = 1; t <= 8 + n; ++t) {
    const ActionIndex k = p.propose(Arrival{t, 0}, rng);
    if (t > 8) passed += k != inst.null_action() ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(passed) / n, 0.8, 0.02);
}

TEST(Osa, ProposesPlanActionWithDiscount) {
  OsaPolicy p(2, {PlanEntry{0, 1, 1.0}}, 0.25, 0);
  Rng rng = make_stream(6, 2);
  int hits = 0;
  const int n = 20'000;
  for (int i = 0; i < n; ++i) hits += p.propose(Arrival{i + 1, 0}, rng) == 1 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.8, 0.01);
}

TEST(Osa, EmptyPlanIsNull) {
  OsaPolicy p(2, {}, 0.25, 0);
  Rng rng = make_stream(6, 2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(p.propose(Arrival{i + 1, 0}, rng), 0u);
}

TEST(Osa, GapInstanceUsesOnlyTheShortAction) {
  const Instance inst = gap_instance(8);
  const PolicyContext ctx = PolicyContext::from_instance(inst);
  const MeanTable means = MeanTable::from_instance(inst);
  const SteadyStateResult ss = solve_lp_s_dense(means, inst.arrival_probs(), inst.capacities());
  PolicyParams params;
  params.eta_bar = 0.25;
  auto p = make_policy("osa", ctx, params, &ss, inst.num_types());
  Rng rng = make_stream(7, 2);
  int k1 = 0;
  const int n = 20'000;
  for (int i = 0; i < n; ++i) {
    const ActionIndex k = p->propose(Arrival{i + 1, 0}, rng);
    EXPECT_NE(k, 2u);
    k1 += k == 1 ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(k1) / n, 0.8, 0.01);
}

TEST(Baselines, GreedyTakesTheLargestReward) {
  const Instance inst = gap_instance(8);
  GreedyPolicy g(PolicyContext::from_instance(inst));
  Rng rng = make_stream(1, 2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(g.propose(Arrival{i + 1, 0}, rng), 2u);
}

TEST(Baselines, GreedyWithZeroRewardsIsNull) {
  const Instance inst = two_action_instance(4.0, 0.0, 1, 0.0, 2);
  GreedyPolicy g(PolicyContext::from_instance(inst));
  Rng rng = make_stream(1, 2);
  EXPECT_EQ(g.propose(Arrival{1, 0}, rng), 0u);
}

TEST(Baselines, NullPolicyOnAnyInstance) {
  Rng gen = make_stream(3, 0);
  const Instance inst = random_tabular_instance(small_params(), gen);
  auto p = make_policy("null", PolicyContext::from_instance(inst), {}, nullptr, inst.num_types());
  const Trajectory traj = run_episode(inst, *p, EpisodeOptions{100, 1});
  for (double w : traj.steps.back().cum_rewards) EXPECT_EQ(w, 0.0);
}

TEST(MakePolicy, UnknownNameIsAConfigError) {
  const Instance inst = gap_instance(8);
  try {
    make_policy("sarsa", PolicyContext::from_instance(inst), {}, nullptr, inst.num_types());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

TEST(Imwu, NeverViolatesCapacity) {
  Rng gen = make_stream(12, 0);
  for (int n = 0; n < 5; ++n) {
    const Instance inst = random_tabular_instance(small_params(), gen);
    ImwuPolicy p(PolicyContext::from_instance(inst));
    const Trajectory traj = run_episode(inst, p, EpisodeOptions{500, static_cast<std::uint64_t>(n)});
    EXPECT_EQ(count_capacity_violations(traj, inst.capacities()), 0u);
  }
}

}  // namespace
}  // namespace rra
