#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "frozen_values.h"
#include "rra/mwu.h"
#include "rra/random_instance.h"

namespace rra {
namespace {

/// One reward, one resource, one type; action 1 has w = 1 and v = 1.
class UnitMeans final : public MeanView {
 public:
  explicit UnitMeans(bool with_action) : with_action_(with_action) {}
  std::size_t num_rewards() const override { return 1; }
  std::size_t num_resources() const override { return 1; }
  std::size_t num_types() const override { return 1; }
  std::size_t num_actions() const override { return with_action_ ? 2 : 1; }
  ActionIndex null_action() const override { return 0; }
  void means(TypeIndex, ActionIndex k, std::span<double> w, std::span<double> v) const override {
    w[0] = k == 1 ? 1.0 : 0.0;
    v[0] = k == 1 ? 1.0 : 0.0;
  }

 private:
  bool with_action_;
};

class FixedOracle final : public KappaOracle {
 public:
  explicit FixedOracle(ActionIndex k) : k_(k) {}
  ActionIndex best_action(const WeightVector&, TypeIndex) const override { return k_; }

 private:
  ActionIndex k_;
};

TEST(Kappa, ZeroObjectiveTiesGoToTheNullAction) {
  const InstanceMeanView view(gap_instance(8));
  WeightVector w{{1.0}, {0.0}};
  EXPECT_EQ(kappa(w, 0, view), 2u);
  // On the null type all objectives are zero and index 0 wins the tie.
  EXPECT_EQ(kappa(w, 1, view), 0u);
}

TEST(Kappa, PureResourceWeightPicksNull) {
  const InstanceMeanView view(gap_instance(8));
  EXPECT_EQ(kappa(WeightVector{{0.0}, {1.0}}, 0, view), 0u);
}

TEST(LearningRate, FormulaValue) {
  EXPECT_NEAR(learning_rate(1, 1.0, 4), frozen::kLearningRateN4, 1e-12);
}

TEST(LearningRate, Scaling) {
  EXPECT_NEAR(learning_rate(4, 1.0, 4), 0.5 * learning_rate(1, 1.0, 4), 1e-15);
  EXPECT_NEAR(learning_rate(3, 2.0, 5), 0.5 * learning_rate(3, 1.0, 5), 1e-15);
  EXPECT_THROW(learning_rate(0, 1.0, 4), Error);
}

TEST(Softmax, StaysOnTheSimplexForHugeExponents) {
  const std::vector<double> g{1e6, -1e6, 0.0};
  const std::vector<double> x{5e5};
  const WeightVector w = softmax_weights(g, x, 10.0);
  EXPECT_NEAR(w.total(), 1.0, 1e-12);
  for (double p : w.phi) EXPECT_GE(p, 0.0);
  EXPECT_NEAR(w.phi[1], 1.0, 1e-12);
}

TEST(VirtualMwu, FirstWeightsAreUniform) {
  const UnitMeans means(true);
  const std::vector<TypeIndex> types{0, 0, 0};
  const std::vector<double> c{2.0};
  const VirtualMwuInput in{types, 0.5, 0.0, 1.0, 1.0, c};
  const auto theta = virtual_mwu(in, means, FixedOracle(1));
  EXPECT_DOUBLE_EQ(theta[0].phi[0], 0.5);
  EXPECT_DOUBLE_EQ(theta[0].psi[0], 0.5);
}

TEST(VirtualMwu, HandTraceOfOneUpdate) {
  const UnitMeans means(true);
  const std::vector<TypeIndex> types{0, 0};
  const std::vector<double> c{2.0};
  const VirtualMwuInput in{types, 0.5, 0.0, 1.0, 1.0, c};
  std::vector<MwuTraceRow> trace;
  const auto theta = virtual_mwu(in, means, FixedOracle(1), &trace);
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_DOUBLE_EQ(trace[1].gamma_exp[0], 0.5);
  EXPECT_DOUBLE_EQ(trace[1].xi_exp[0], 0.0);
  EXPECT_NEAR(theta[1].phi[0], frozen::kTracePhi2, 1e-12);
}

TEST(VirtualMwu, AllZeroInstanceClosedForm) {
  const UnitMeans means(false);
  const std::vector<TypeIndex> types(20, 0);
  const std::vector<double> c{3.0};
  const double target = 0.4;
  const VirtualMwuInput in{types, 0.5, 0.1, 1.0, 2.0, c};
  std::vector<MwuTraceRow> trace;
  const auto theta = virtual_mwu(in, means, FixedOracle(0), &trace);
  for (std::size_t s = 1; s < trace.size(); ++s) {
    EXPECT_NEAR(trace[s].gamma_exp[0], -static_cast<double>(s) * target, 1e-12);
    EXPECT_NEAR(trace[s].xi_exp[0], static_cast<double>(s) * 2.0, 1e-12);
  }
  for (std::size_t s = 1; s < theta.size(); ++s) EXPECT_GT(theta[s].phi[0], theta[s - 1].phi[0]);
}

TEST(VirtualMwu, EmptyWindowThrows) {
  const UnitMeans means(true);
  const std::vector<double> c{1.0};
  const VirtualMwuInput in{{}, 0.5, 0.0, 1.0, 1.0, c};
  try {
    virtual_mwu(in, means, FixedOracle(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySampleWindow);
  }
}

TEST(Regret, ConstantLossesKeepWeightsUniform) {
  const std::vector<std::vector<double>> losses(50, std::vector<double>(4, 0.3));
  const RegretReport r = mwu_regret_harness(losses, 1.0);
  EXPECT_NEAR(r.weighted_average, 0.3, 1e-12);
  for (double a : r.average_loss) EXPECT_NEAR(a, 0.3, 1e-12);
}

TEST(Regret, SingleCoordinateIsExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> losses(100, std::vector<double>(1));
  for (auto& l : losses) l[0] = u(rng);
  const RegretReport r = mwu_regret_harness(losses, 1.0);
  EXPECT_NEAR(r.weighted_average, r.average_loss[0], 1e-12);
}

TEST(Regret, BoundHoldsOnRandomSequences) {
  Rng rng = make_stream(99, 0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<std::vector<double>> losses(10'000, std::vector<double>(4));
    for (auto& l : losses)
      for (double& x : l) x = u(rng);
    EXPECT_GE(mwu_regret_harness(losses, 1.0).slack(), 0.0);
  }
}

}  // namespace
}  // namespace rra
