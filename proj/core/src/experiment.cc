#include "rra/experiment.h"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace rra {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Metrics

MetricSeries compute_metrics(const Trajectory& trajectory, double lambda_star) {
  if (!(lambda_star > 0.0))
    throw Error(ErrorCode::kZeroBenchmark, fmt::format("benchmark value {} is not positive", lambda_star));
  MetricSeries m;
  m.n_rewards = trajectory.n_rewards;
  m.n_resources = trajectory.n_resources;
  m.lambda_star = lambda_star;
  const std::size_t T = trajectory.steps.size();
  m.gap.reserve(T * m.n_rewards);
  m.normalized.reserve(T);
  m.occupied.reserve(T * m.n_resources);
  for (std::size_t s = 0; s < T; ++s) {
    const StepRecord& rec = trajectory.steps[s];
    const double t = static_cast<double>(rec.t);
    const double target = t * lambda_star;
    double worst = 0.0;
    for (std::size_t i = 0; i < m.n_rewards; ++i) {
      m.gap.push_back((target - rec.cum_rewards[i]) / target);
      const double avg = rec.cum_rewards[i] / t;
      worst = i == 0 ? avg : std::min(worst, avg);
    }
    m.normalized.push_back(worst);
    for (std::size_t i = 0; i < m.n_resources; ++i) m.occupied.push_back(rec.occupied[i]);
  }
  return m;
}

void write_metrics_csv(const MetricSeries& series, std::ostream& out) {
  out << "t";
  for (std::size_t i = 1; i <= series.n_rewards; ++i) out << ",gap_" << i;
  out << ",normalized_reward";
  for (std::size_t i = 1; i <= series.n_resources; ++i) out << ",occupied_" << i;
  out << '\n';
  for (TimeStep t = 1; t <= series.horizon(); ++t) {
    out << t;
    for (std::size_t i = 0; i < series.n_rewards; ++i) out << ',' << fmt::format("{}", series.gap_at(t, i));
    out << ',' << fmt::format("{}", series.normalized[t - 1]);
    for (std::size_t i = 0; i < series.n_resources; ++i)
      out << ',' << fmt::format("{}", series.occupied_at(t, i));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, what); };
  if (seeds.empty()) fail("seeds must not be empty");
  if (xi && !(*xi > 0.0 && *xi <= 1.0)) fail(fmt::format("xi {} outside (0, 1]", *xi));
  if (horizon < 1) fail("horizon must be >= 1");
  if (policy != "imwu" && policy != "osa" && policy != "null" && policy != "greedy")
    fail(fmt::format("unknown policy '{}'", policy));
  if (!(policy_params.delta > 0.0 && policy_params.delta < 1.0))
    throw Error(ErrorCode::kInvalidDelta, fmt::format("delta {} outside (0, 1)", policy_params.delta));
  if (source == InstanceSource::kFile && instance_file.empty()) fail("instance file path is empty");
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

void only_fields(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error(fmt::format("{} must be an object", where));
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_error(fmt::format("unknown field '{}' in {}", key, where));
}

template <class T>
void read_opt(const json& obj, const char* name, T& out) {
  auto it = obj.find(name);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    config_error(fmt::format("field '{}': {}", name, e.what()));
  }
}

SyntheticParams parse_synthetic(const json& j, std::uint64_t& seed) {
  only_fields(j, "synthetic", {"seed", "n_resources", "n_types", "max_assortment", "feature_dim", "price_min",
                               "price_max", "utility_scale", "duration_cap", "duration_support", "sigma"});
  SyntheticParams p;
  read_opt(j, "seed", seed);
  read_opt(j, "n_resources", p.n_resources);
  read_opt(j, "n_types", p.n_types);
  read_opt(j, "max_assortment", p.max_assortment);
  read_opt(j, "feature_dim", p.feature_dim);
  read_opt(j, "price_min", p.price_min);
  read_opt(j, "price_max", p.price_max);
  read_opt(j, "utility_scale", p.utility_scale);
  read_opt(j, "duration_cap", p.duration_cap);
  read_opt(j, "duration_support", p.duration_support);
  read_opt(j, "sigma", p.sigma);
  return p;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(fmt::format("config is not valid JSON: {}", e.what()));
  }
  only_fields(doc, "config", {"instance", "policy", "xi", "horizon", "seeds", "output_dir",
                              "write_trajectories", "threads"});
  ExperimentConfig c;
  if (!doc.contains("instance")) config_error("missing field 'instance'");
  const json& inst = doc["instance"];
  only_fields(inst, "instance", {"file", "synthetic"});
  if (inst.contains("file") == inst.contains("synthetic"))
    config_error("instance needs exactly one of 'file' and 'synthetic'");
  if (inst.contains("file")) {
    c.source = InstanceSource::kFile;
    std::string path;
    read_opt(inst, "file", path);
    c.instance_file = path;
  } else {
    c.source = InstanceSource::kSynthetic;
    c.synthetic = parse_synthetic(inst["synthetic"], c.instance_seed);
  }
  if (auto it = doc.find("policy"); it != doc.end()) {
    if (it->is_string()) {
      c.policy = it->get<std::string>();
    } else {
      only_fields(*it, "policy", {"name", "delta", "eta_bar"});
      read_opt(*it, "name", c.policy);
      read_opt(*it, "delta", c.policy_params.delta);
      if (it->contains("eta_bar") && !(*it)["eta_bar"].is_null()) {
        double eta = 0.0;
        read_opt(*it, "eta_bar", eta);
        c.policy_params.eta_bar = eta;
      }
    }
  }
  if (doc.contains("xi") && !doc["xi"].is_null()) {
    double xi = 0.0;
    read_opt(doc, "xi", xi);
    c.xi = xi;
  }
  read_opt(doc, "horizon", c.horizon);
  read_opt(doc, "seeds", c.seeds);
  std::string out;
  read_opt(doc, "output_dir", out);
  c.output_dir = out;
  read_opt(doc, "write_trajectories", c.write_trajectories);
  read_opt(doc, "threads", c.threads);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error(fmt::format("cannot open config {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

// ---------------------------------------------------------------------------
// Running

LoadedInstance materialize_instance(const ExperimentConfig& config) {
  if (config.source == InstanceSource::kSynthetic) {
    const SyntheticInstance syn = generate_synthetic_instance(config.synthetic, config.instance_seed);
    return LoadedInstance{syn.instance(config.xi.value_or(1.0 / 200.0)), syn.outcomes};
  }
  LoadedInstance loaded = load_instance(config.instance_file);
  if (config.xi) {
    const double a_max = loaded.instance.outcomes().support_bounds().a_max;
    if (!(a_max > 0.0)) config_error("xi override needs a positive a_max");
    loaded.instance = loaded.instance.with_capacities(
        std::vector<double>(loaded.instance.num_resources(), a_max / *config.xi));
  }
  return loaded;
}

PolicyContext make_context(const LoadedInstance& loaded) {
  std::shared_ptr<const KappaOracle> kappa;
  if (loaded.mnl) kappa = std::make_shared<MnlAssortmentKappa>(loaded.mnl);
  return PolicyContext::from_instance(loaded.instance, std::move(kappa));
}

SteadyStateResult solve_benchmark(const LoadedInstance& loaded, const PolicyContext& context) {
  return solve_lp_s_colgen(*context.means, loaded.instance.arrival_probs(), loaded.instance.capacities(),
                           *context.kappa);
}

double ExperimentResult::mean_final_gap(std::size_t i) const {
  double s = 0.0;
  for (const auto& r : seeds) s += r.metrics.gap_at(r.metrics.horizon(), i);
  return s / static_cast<double>(seeds.size());
}

double ExperimentResult::mean_final_normalized() const {
  double s = 0.0;
  for (const auto& r : seeds) s += r.metrics.normalized.back();
  return s / static_cast<double>(seeds.size());
}

std::size_t ExperimentResult::total_violations() const {
  std::size_t n = 0;
  for (const auto& r : seeds) n += r.capacity_violations;
  return n;
}

namespace {

struct MeanVar {
  std::vector<double> mean;
  std::vector<double> var;
};

// Per-index mean and sample variance (zero for a single seed).
MeanVar across_seeds(const std::vector<const std::vector<double>*>& series) {
  MeanVar mv;
  if (series.empty()) return mv;
  const std::size_t n = series.front()->size();
  const double count = static_cast<double>(series.size());
  mv.mean.assign(n, 0.0);
  mv.var.assign(n, 0.0);
  for (const auto* s : series)
    for (std::size_t x = 0; x < n; ++x) mv.mean[x] += (*s)[x];
  for (auto& m : mv.mean) m /= count;
  if (series.size() > 1) {
    for (const auto* s : series)
      for (std::size_t x = 0; x < n; ++x) {
        const double d = (*s)[x] - mv.mean[x];
        mv.var[x] += d * d;
      }
    for (auto& v : mv.var) v /= count - 1.0;
  }
  return mv;
}

// Splits a row-major (t, i) vector into one series per i.
std::vector<std::vector<double>> by_column(const std::vector<double>& flat, std::size_t width) {
  std::vector<std::vector<double>> cols(width);
  for (std::size_t x = 0; x < flat.size(); ++x) cols[x % width].push_back(flat[x]);
  return cols;
}

}  // namespace

std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result,
                         const std::vector<std::string>& failures) {
  json doc;
  doc["policy"] = config.policy;
  doc["lambda_star"] = result.lambda_star;
  doc["horizon"] = config.horizon;
  doc["xi"] = result.bounds.xi;
  doc["n_types"] = result.n_types;
  doc["n_actions"] = result.n_actions;
  std::vector<std::uint64_t> seeds;
  for (const auto& r : result.seeds) seeds.push_back(r.seed);
  doc["seeds"] = seeds;
  doc["complete"] = failures.empty();
  doc["failures"] = failures;
  doc["capacity_violations"] = result.total_violations();
  if (result.seeds.empty()) return doc.dump(1) + "\n";

  const auto& first = result.seeds.front().metrics;
  const std::size_t nr = first.n_rewards, nc = first.n_resources;
  std::vector<std::vector<std::vector<double>>> gaps, occ;
  std::vector<const std::vector<double>*> norm;
  for (const auto& r : result.seeds) {
    gaps.push_back(by_column(r.metrics.gap, nr));
    occ.push_back(by_column(r.metrics.occupied, nc));
    norm.push_back(&r.metrics.normalized);
  }
  json gap_mean = json::array(), gap_var = json::array(), occ_mean = json::array(), occ_var = json::array();
  json final_gap = json::array();
  for (std::size_t i = 0; i < nr; ++i) {
    std::vector<const std::vector<double>*> cols;
    for (const auto& g : gaps) cols.push_back(&g[i]);
    const MeanVar mv = across_seeds(cols);
    gap_mean.push_back(mv.mean);
    gap_var.push_back(mv.var);
    final_gap.push_back(mv.mean.empty() ? 0.0 : mv.mean.back());
  }
  for (std::size_t i = 0; i < nc; ++i) {
    std::vector<const std::vector<double>*> cols;
    for (const auto& o : occ) cols.push_back(&o[i]);
    const MeanVar mv = across_seeds(cols);
    occ_mean.push_back(mv.mean);
    occ_var.push_back(mv.var);
  }
  const MeanVar nv = across_seeds(norm);
  doc["final_gap_mean"] = final_gap;
  doc["final_normalized_mean"] = nv.mean.empty() ? 0.0 : nv.mean.back();
  doc["gap_mean"] = gap_mean;
  doc["gap_var"] = gap_var;
  doc["normalized_mean"] = nv.mean;
  doc["normalized_var"] = nv.var;
  doc["occupied_mean"] = occ_mean;
  doc["occupied_var"] = occ_var;
  return doc.dump(1) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const LoadedInstance loaded = materialize_instance(config);
  const Instance& instance = loaded.instance;
  const PolicyContext ctx = make_context(loaded);
  const SteadyStateResult benchmark = solve_benchmark(loaded, ctx);

  ExperimentResult result;
  result.lambda_star = benchmark.lambda;
  result.reward_duals = benchmark.duals.rho;
  result.n_types = instance.num_types();
  result.n_actions = instance.num_actions();
  result.bounds = ctx.bounds;
  if (!(benchmark.lambda > 0.0))
    throw Error(ErrorCode::kZeroBenchmark, "the steady-state optimum is zero; metrics are undefined");

  std::filesystem::path out_dir = config.output_dir;
  if (const char* env = std::getenv("RRA_OUTPUT_DIR"); env && *env) out_dir = env;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  const std::size_t n = config.seeds.size();
  std::vector<std::optional<SeedResult>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s; (s = next.fetch_add(1)) < n;) {
      try {
        const std::uint64_t seed = config.seeds[s];
        auto policy = make_policy(config.policy, ctx, config.policy_params, &benchmark, instance.num_types());
        const Trajectory traj = run_episode(instance, *policy, EpisodeOptions{config.horizon, seed, {}, false});
        SeedResult r;
        r.seed = seed;
        r.metrics = compute_metrics(traj, benchmark.lambda);
        r.capacity_violations = count_capacity_violations(traj, instance.capacities());
        for (const auto& st : traj.steps) r.gate_rejections += st.proposed != st.action ? 1 : 0;
        if (!out_dir.empty()) {
          std::ofstream m(out_dir / fmt::format("seed_{}_metrics.csv", seed));
          write_metrics_csv(r.metrics, m);
          if (!m) throw Error(ErrorCode::kIoError, "writing the metrics file failed");
          if (config.write_trajectories) {
            std::ofstream tr(out_dir / fmt::format("seed_{}_trajectory.csv", seed));
            write_trajectory_csv(traj, tr);
            if (!tr) throw Error(ErrorCode::kIoError, "writing the trajectory file failed");
          }
        }
        slots[s] = std::move(r);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<std::string> failures;
  std::exception_ptr first_error;
  for (std::size_t s = 0; s < n; ++s) {
    if (slots[s]) {
      result.seeds.push_back(std::move(*slots[s]));
      continue;
    }
    if (!first_error) first_error = errors[s];
    try {
      std::rethrow_exception(errors[s]);
    } catch (const std::exception& e) {
      failures.push_back(fmt::format("seed {}: {}", config.seeds[s], e.what()));
    }
  }
  if (!out_dir.empty()) {
    std::ofstream sj(out_dir / "summary.json");
    sj << summary_json(config, result, failures);
  }
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

}  // namespace rra
