#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "frozen_values.h"
#include "rra/model.h"
#include "rra/random_instance.h"

namespace rra {
namespace {

std::shared_ptr<TabularOutcomeModel> one_action_model(double w, double a, int d) {
  auto m = std::make_shared<TabularOutcomeModel>(1, 1, 2, 2);
  m->set_deterministic(0, 1, {w}, {a}, {d});
  return m;
}

InstanceSpec one_action_spec() {
  InstanceSpec s;
  s.capacities = {2.0};
  s.arrival_probs = {1.0, 0.0};
  s.null_type = 1;
  s.null_action = 0;
  s.outcomes = one_action_model(1.0, 1.0, 1);
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no rra::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(BuildInstance, RequiresNullType) {
  InstanceSpec s = one_action_spec();
  s.null_type.reset();
  EXPECT_EQ(code_of([&] { build_instance(s); }), ErrorCode::kMissingNullType);
}

TEST(BuildInstance, RequiresNullAction) {
  InstanceSpec s = one_action_spec();
  s.null_action.reset();
  EXPECT_EQ(code_of([&] { build_instance(s); }), ErrorCode::kMissingNullAction);
}

TEST(BuildInstance, RejectsZeroCapacity) {
  InstanceSpec s = one_action_spec();
  s.capacities = {0.0};
  EXPECT_EQ(code_of([&] { build_instance(s); }), ErrorCode::kNonpositiveCapacity);
}

TEST(BuildInstance, RejectsProbabilitiesOffTheSimplex) {
  InstanceSpec s = one_action_spec();
  s.arrival_probs = {0.7, 0.2};
  EXPECT_EQ(code_of([&] { build_instance(s); }), ErrorCode::kMalformedProbabilities);
}

TEST(BuildInstance, RejectsNonzeroNullCell) {
  InstanceSpec s = one_action_spec();
  auto m = one_action_model(1.0, 1.0, 1);
  m->set_deterministic(1, 1, {1.0}, {1.0}, {1});
  s.outcomes = m;
  EXPECT_EQ(code_of([&] { build_instance(s); }), ErrorCode::kInvalidArgument);
}

TEST(BuildInstance, GapInstanceIsValid) {
  const Instance inst = gap_instance(8);
  EXPECT_EQ(inst.num_rewards(), 1u);
  EXPECT_EQ(inst.num_resources(), 1u);
  EXPECT_EQ(inst.num_actions(), 3u);
  EXPECT_DOUBLE_EQ(inst.capacities()[0], 4.0);
  EXPECT_DOUBLE_EQ(inst.arrival_probs()[0], 1.0);
}

TEST(TabularModel, RejectsBadSupport) {
  TabularOutcomeModel m(1, 1, 2, 2);
  SupportPoint a{0.5, {1.0}, {1.0}, {1}};
  SupportPoint b{0.4, {1.0}, {1.0}, {1}};
  EXPECT_EQ(code_of([&] { m.set_distribution(0, 1, {a, b}); }), ErrorCode::kMalformedProbabilities);
  EXPECT_EQ(code_of([&] { m.set_deterministic(5, 1, {1.0}, {1.0}, {1}); }),
            ErrorCode::kIndexOutOfRange);
}

TEST(SampleArrival, DegenerateDistribution) {
  Rng rng = make_stream(3, 0);
  const std::vector<double> p{1.0};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_arrival(rng, p), 0u);
}

TEST(SampleArrival, ReproducibleForAFixedSeed) {
  const std::vector<double> p{0.5, 0.5};
  Rng a = make_stream(42, 1);
  Rng b = make_stream(42, 1);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(sample_arrival(a, p), sample_arrival(b, p));
}

TEST(SampleArrival, FrequencyMatchesProbability) {
  const std::vector<double> p{0.3, 0.7};
  Rng rng = make_stream(7, 0);
  ArrivalSampler sampler(p);
  int ones = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) ones += sampler(rng) == 1 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.7, 0.01);
}

TEST(SampleOutcome, NullTypeAndNullActionAreZero) {
  const Instance inst = gap_instance(8);
  Rng rng = make_stream(1, 0);
  for (ActionIndex k = 0; k < inst.num_actions(); ++k)
    EXPECT_TRUE(sample_outcome(inst, rng, inst.null_type(), k).is_zero());
  EXPECT_TRUE(sample_outcome(inst, rng, 0, inst.null_action()).is_zero());
}

TEST(SampleOutcome, GapActionIsDeterministic) {
  const Instance inst = gap_instance(8);
  Rng rng = make_stream(1, 0);
  const Outcome o = sample_outcome(inst, rng, 0, 1);
  EXPECT_DOUBLE_EQ(o.rewards[0], 0.75);
  EXPECT_DOUBLE_EQ(o.allocations[0], 1.0);
  EXPECT_EQ(o.durations[0], 4);
}

TEST(MeanOutcomes, NullTypeIsZero) {
  const Instance inst = gap_instance(8);
  for (const auto& m : mean_outcomes_for_type(inst, inst.null_type())) {
    EXPECT_EQ(m.reward[0], 0.0);
    EXPECT_EQ(m.volume[0], 0.0);
  }
}

TEST(MeanOutcomes, GapInstanceMeans) {
  const Instance inst = gap_instance(8);
  const auto m = mean_outcomes_for_type(inst, 0);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m[0].reward[0], 0.0);
  EXPECT_DOUBLE_EQ(m[0].volume[0], 0.0);
  EXPECT_DOUBLE_EQ(m[1].reward[0], 0.75);
  EXPECT_DOUBLE_EQ(m[1].volume[0], 4.0);
  EXPECT_DOUBLE_EQ(m[2].reward[0], 1.0);
  EXPECT_DOUBLE_EQ(m[2].volume[0], 8.0);
}

TEST(MeanOutcomes, IndependentAllocationAndDurationFactorize) {
  // A in {1, 2} and D in {1, 3} drawn independently on each of two resources.
  TabularOutcomeModel m(1, 2, 2, 2);
  std::vector<SupportPoint> pts;
  for (double a : {1.0, 2.0})
    for (int d : {1, 3}) pts.push_back(SupportPoint{0.25, {1.0}, {a, 2.0 * a}, {d, d + 1}});
  m.set_distribution(0, 1, pts);
  std::vector<double> w(1), v(2), a(2), d(2);
  m.mean_outcome(0, 1, w, v);
  m.mean_allocation(0, 1, a, d);
  // Joint support here is a product of independent marginals.
  EXPECT_DOUBLE_EQ(v[0], a[0] * d[0]);
  EXPECT_DOUBLE_EQ(v[1], a[1] * d[1]);
}

TEST(SampleOutcome, SampleMeansMatchStoredMeans) {
  Rng gen = make_stream(11, 0);
  const Instance inst = random_tabular_instance(small_params(), gen);
  const Bounds b = compute_bounds(inst);
  Rng rng = make_stream(11, 1);
  const int n = 100'000;
  const double tol_w = 3.0 * b.w_max / std::sqrt(static_cast<double>(n));
  const double tol_v = 3.0 * b.a_max * b.d_max / std::sqrt(static_cast<double>(n));
  for (TypeIndex j = 0; j < inst.num_types(); ++j) {
    for (ActionIndex k = 0; k < inst.num_actions(); ++k) {
      std::vector<double> w(inst.num_rewards()), v(inst.num_resources());
      inst.outcomes().mean_outcome(j, k, w, v);
      std::vector<double> sw(w.size(), 0.0), sv(v.size(), 0.0);
      for (int s = 0; s < n; ++s) {
        const Outcome o = sample_outcome(inst, rng, j, k);
        for (std::size_t i = 0; i < w.size(); ++i) sw[i] += o.rewards[i];
        for (std::size_t i = 0; i < v.size(); ++i) sv[i] += o.allocations[i] * o.durations[i];
      }
      for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(sw[i] / n, w[i], tol_w);
      for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(sv[i] / n, v[i], tol_v);
    }
  }
}

TEST(Bounds, GammaIsTheLargerBound) {
  const Bounds b = make_bounds(1.0, 1.0, 4, 4.0, 10.0, 1);
  EXPECT_DOUBLE_EQ(b.gamma, 4.0);
}

TEST(Bounds, AssumptionHolds) {
  const Bounds b = make_bounds(1.0, 1.0, 1, 1.0, 20.0, 1);
  EXPECT_DOUBLE_EQ(b.xi, 0.05);
  EXPECT_NEAR(b.assumption_value, frozen::kAssumptionXi005, 1e-12);
  EXPECT_TRUE(b.assumption_holds);
}

TEST(Bounds, AssumptionViolatedIsFlagged) {
  const Bounds b = make_bounds(1.0, 1.0, 1, 1.0, 1.0, 8);
  EXPECT_DOUBLE_EQ(b.xi, 1.0);
  EXPECT_NEAR(b.assumption_value, frozen::kAssumptionXi1N8, 1e-12);
  EXPECT_FALSE(b.assumption_holds);
}

TEST(Bounds, GapInstanceBounds) {
  const Bounds b = compute_bounds(gap_instance(8));
  EXPECT_DOUBLE_EQ(b.w_max, 1.0);
  EXPECT_DOUBLE_EQ(b.a_max, 1.0);
  EXPECT_EQ(b.d_max, 8);
  EXPECT_DOUBLE_EQ(b.v_max, 8.0);
  EXPECT_DOUBLE_EQ(b.gamma, 8.0);
  EXPECT_DOUBLE_EQ(b.xi, 0.25);
}

}  // namespace
}  // namespace rra
