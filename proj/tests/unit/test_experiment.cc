#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rra/experiment.h"
#include "rra/instance_io.h"
#include "rra/random_instance.h"

namespace rra {
namespace {

Trajectory linear_trajectory(TimeStep T, double rate) {
  Trajectory traj;
  traj.n_rewards = 1;
  traj.n_resources = 1;
  for (TimeStep t = 1; t <= T; ++t) {
    StepRecord s;
    s.t = t;
    s.cum_rewards = {rate * static_cast<double>(t)};
    s.occupied = {0.0};
    s.outcome = Outcome(1, 1);
    traj.steps.push_back(std::move(s));
  }
  return traj;
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

TEST(Metrics, GapArithmetic) {
  const MetricSeries m = compute_metrics(linear_trajectory(10, 0.8), 1.0);
  EXPECT_NEAR(m.gap_at(10, 0), 0.2, 1e-12);
  EXPECT_NEAR(m.normalized.back(), 0.8, 1e-12);
}

TEST(Metrics, ZeroAndNegativeGaps) {
  EXPECT_NEAR(compute_metrics(linear_trajectory(10, 1.0), 1.0).gap_at(10, 0), 0.0, 1e-12);
  EXPECT_LT(compute_metrics(linear_trajectory(10, 1.5), 1.0).gap_at(10, 0), 0.0);
}

TEST(Metrics, ZeroBenchmarkIsAnError) {
  EXPECT_EQ(code_of([] { compute_metrics(linear_trajectory(3, 1.0), 0.0); }), ErrorCode::kZeroBenchmark);
}

TEST(Metrics, CsvLayout) {
  const MetricSeries m = compute_metrics(linear_trajectory(3, 0.5), 1.0);
  std::stringstream buf;
  write_metrics_csv(m, buf);
  std::string header, first;
  std::getline(buf, header);
  std::getline(buf, first);
  EXPECT_EQ(header, "t,gap_1,normalized_reward,occupied_1");
  EXPECT_EQ(first, "1,0.5,0.5,0");
}

TEST(Config, ParsesAFullDocument) {
  const ExperimentConfig c = parse_experiment_config(R"({
    "instance": {"synthetic": {"seed": 4, "n_types": 50}},
    "policy": {"name": "osa", "eta_bar": 0.1},
    "xi": 0.05, "horizon": 500, "seeds": [3, 5], "write_trajectories": false
  })");
  EXPECT_EQ(c.source, InstanceSource::kSynthetic);
  EXPECT_EQ(c.instance_seed, 4u);
  EXPECT_EQ(c.synthetic.n_types, 50u);
  EXPECT_EQ(c.policy, "osa");
  EXPECT_EQ(c.policy_params.eta_bar, 0.1);
  EXPECT_EQ(c.xi, 0.05);
  EXPECT_EQ(c.horizon, 500);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 5}));
  EXPECT_FALSE(c.write_trajectories);
}

TEST(Config, RejectsSchemaErrors) {
  const char* bad[] = {
      R"({"policy": "imwu"})",
      R"({"instance": {"synthetic": {}}, "colour": 1})",
      R"({"instance": {"file": "a.json", "synthetic": {}}})",
      R"({"instance": {"synthetic": {"n_types": "many"}}})",
      R"({"instance": {"synthetic": {}}, "policy": "sarsa"})",
      R"({"instance": {"synthetic": {}}, "horizon": 0})",
      R"({"instance": {"synthetic": {}}, "policy": {"name": "imwu", "delta": 1.5}})",
  };
  for (const char* text : bad) {
    try {
      parse_experiment_config(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kConfigError || e.code() == ErrorCode::kInvalidDelta) << text;
    }
  }
}

TEST(InstanceFile, TabularRoundTripIsByteStable) {
  Rng gen = make_stream(6, 0);
  const Instance inst = random_tabular_instance(small_params(), gen);
  const std::string a = serialize_instance(inst);
  const LoadedInstance back = parse_instance(a);
  EXPECT_EQ(serialize_instance(back.instance), a);
  EXPECT_EQ(back.mnl, nullptr);
}

TEST(InstanceFile, SyntheticSameSeedSameBytes) {
  SyntheticParams p;
  p.n_types = 15;
  const std::string a = serialize_instance(generate_synthetic_instance(p, 3).instance(0.05));
  const std::string b = serialize_instance(generate_synthetic_instance(p, 3).instance(0.05));
  EXPECT_EQ(a, b);
  const LoadedInstance back = parse_instance(a);
  ASSERT_NE(back.mnl, nullptr);
  EXPECT_EQ(serialize_instance(back.instance), a);
}

TEST(InstanceFile, RejectsUnknownFieldsAndBadJson) {
  Rng gen = make_stream(6, 0);
  auto doc = nlohmann::json::parse(serialize_instance(random_tabular_instance(tiny_params(), gen)));
  doc["surprise"] = 1;
  EXPECT_EQ(code_of([&] { parse_instance(doc.dump()); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { parse_instance("{not json"); }), ErrorCode::kIoError);
  EXPECT_EQ(code_of([] { load_instance("/nonexistent/instance.json"); }), ErrorCode::kIoError);
}

TEST(Synthetic, DefaultCatalogSize) {
  SyntheticParams p;
  p.n_types = 2;
  const SyntheticInstance s = generate_synthetic_instance(p, 1);
  EXPECT_EQ(s.outcomes->num_actions(), 3473u);
  EXPECT_EQ(s.outcomes->num_resources(), 14u);
}

TEST(Synthetic, SmallerTypeCountIsAPrefix) {
  SyntheticParams small, large;
  small.n_types = 10;
  large.n_types = 30;
  const SyntheticInstance a = generate_synthetic_instance(small, 8);
  const SyntheticInstance b = generate_synthetic_instance(large, 8);
  EXPECT_EQ(a.mnl->prices(), b.mnl->prices());
  EXPECT_EQ(a.mnl->product_features(), b.mnl->product_features());
  EXPECT_EQ(a.kpi.category, b.kpi.category);
  for (std::size_t j = 0; j < 10; ++j) {
    EXPECT_EQ(a.mnl->customer_features()[j], b.mnl->customer_features()[j]);
    for (std::size_t i = 0; i < 14; ++i) {
      EXPECT_EQ(a.mnl->utility(j, i), b.mnl->utility(j, i));
      EXPECT_EQ(a.mnl->duration(j, i).values, b.mnl->duration(j, i).values);
    }
  }
}

class RunExperiment : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("RRA_OUTPUT_DIR");
    dir_ = std::filesystem::temp_directory_path() /
           ("rra_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  ExperimentConfig small_config(const std::string& policy) const {
    ExperimentConfig c;
    c.synthetic.n_types = 10;
    c.synthetic.duration_cap = 10;
    c.xi = 0.05;
    c.policy = policy;
    c.horizon = 300;
    c.seeds = {1, 2};
    c.output_dir = dir_;
    c.threads = 1;
    return c;
  }

  std::filesystem::path dir_;
};

TEST_F(RunExperiment, NullPolicyHasZeroNormalizedReward) {
  const ExperimentResult r = run_experiment(small_config("null"));
  ASSERT_EQ(r.seeds.size(), 2u);
  for (const auto& s : r.seeds)
    for (double x : s.metrics.normalized) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(r.total_violations(), 0u);
}

TEST_F(RunExperiment, WritesMetricsTrajectoriesAndSummary) {
  const ExperimentResult r = run_experiment(small_config("imwu"));
  for (int s : {1, 2}) {
    EXPECT_TRUE(std::filesystem::exists(dir_ / ("seed_" + std::to_string(s) + "_metrics.csv")));
    EXPECT_TRUE(std::filesystem::exists(dir_ / ("seed_" + std::to_string(s) + "_trajectory.csv")));
  }
  std::ifstream in(dir_ / "summary.json");
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["policy"], "imwu");
  EXPECT_TRUE(doc["complete"].get<bool>());
  EXPECT_EQ(doc["capacity_violations"], 0);
  EXPECT_EQ(doc["normalized_mean"].size(), 300u);
  EXPECT_EQ(doc["gap_mean"].size(), 3u);
  EXPECT_NEAR(doc["lambda_star"].get<double>(), r.lambda_star, 1e-15);
  EXPECT_NEAR(doc["final_normalized_mean"].get<double>(), r.mean_final_normalized(), 1e-12);
}

TEST_F(RunExperiment, SeedsAreReproducible) {
  ExperimentConfig c = small_config("osa");
  c.output_dir.clear();
  const ExperimentResult a = run_experiment(c);
  const ExperimentResult b = run_experiment(c);
  for (std::size_t s = 0; s < a.seeds.size(); ++s) EXPECT_EQ(a.seeds[s].metrics.gap, b.seeds[s].metrics.gap);
}

}  // namespace
}  // namespace rra
