#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rra/colgen.h"
#include "rra/instance_io.h"
#include "rra/policy.h"
#include "rra/random_instance.h"
#include "rra/simulator.h"

namespace rra {

/// Per-step metrics of one episode. Row-major by step: gap[(t-1) * n_rewards + i].
struct MetricSeries {
  std::size_t n_rewards = 0;
  std::size_t n_resources = 0;
  double lambda_star = 0.0;
  std::vector<double> gap;         // (t lambda - sum_{tau<=t} W_i) / (t lambda)
  std::vector<double> normalized;  // min_i (1/t) sum_{tau<=t} W_i
  std::vector<double> occupied;    // occupancy after step t

  TimeStep horizon() const { return static_cast<TimeStep>(normalized.size()); }
  double gap_at(TimeStep t, std::size_t i) const { return gap[(t - 1) * n_rewards + i]; }
  double occupied_at(TimeStep t, std::size_t i) const { return occupied[(t - 1) * n_resources + i]; }
};

/// Throws kZeroBenchmark unless lambda_star > 0.
MetricSeries compute_metrics(const Trajectory& trajectory, double lambda_star);

/// Columns: t, gap_1.., normalized_reward, occupied_1..
void write_metrics_csv(const MetricSeries& series, std::ostream& out);

enum class InstanceSource { kFile, kSynthetic };

struct ExperimentConfig {
  InstanceSource source = InstanceSource::kSynthetic;
  std::filesystem::path instance_file;
  SyntheticParams synthetic;
  std::uint64_t instance_seed = 1;
  /// When set, every capacity becomes a_max / xi.
  std::optional<double> xi;
  std::string policy = "imwu";
  PolicyParams policy_params;
  TimeStep horizon = 10'000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::filesystem::path output_dir;  // empty: keep results in memory only
  bool write_trajectories = true;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Parses the JSON experiment configuration (see docs/file_formats.md).
/// Throws kConfigError on schema errors.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// The instance (and, for assortment instances, its outcome model) described
/// by a configuration, with the xi override applied.
LoadedInstance materialize_instance(const ExperimentConfig& config);

/// Policy context with the oracle suited to the instance kind.
PolicyContext make_context(const LoadedInstance& loaded);

/// Steady-state optimum for the true arrival distribution, by column generation.
SteadyStateResult solve_benchmark(const LoadedInstance& loaded, const PolicyContext& context);

struct SeedResult {
  std::uint64_t seed = 0;
  MetricSeries metrics;
  std::size_t capacity_violations = 0;
  std::size_t gate_rejections = 0;  // proposals downgraded to null by the gate
};

struct ExperimentResult {
  double lambda_star = 0.0;
  /// Shadow prices of the benchmark's reward rows; positive marks a binding objective.
  std::vector<double> reward_duals;
  std::vector<SeedResult> seeds;
  std::size_t n_types = 0;
  std::size_t n_actions = 0;
  Bounds bounds;

  /// Mean over seeds of the final gap of objective i / final normalized reward.
  double mean_final_gap(std::size_t i) const;
  double mean_final_normalized() const;
  std::size_t total_violations() const;
};

/// Solves lambda_* once, runs the policy for every seed (in parallel), and,
/// when an output directory is configured (RRA_OUTPUT_DIR overrides it),
/// writes seed_<s>_metrics.csv, seed_<s>_trajectory.csv and summary.json.
/// A failing seed marks the summary incomplete and its error is rethrown
/// after the other seeds finish.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// The summary document: per-t mean and sample variance across seeds.
std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result,
                         const std::vector<std::string>& failures);

}  // namespace rra
