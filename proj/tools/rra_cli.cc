// Command line front end: instance generation, LP benchmarks, experiment
// runs and the verification suite.

#include <fmt/format.h>

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rra/colgen.h"
#include "rra/experiment.h"
#include "rra/instance_io.h"
#include "rra/lp_builders.h"
#include "rra/random_instance.h"
#include "rra/verify.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(rra::ErrorCode code) {
  switch (code) {
    case rra::ErrorCode::kConfigError:
    case rra::ErrorCode::kInvalidDelta:
    case rra::ErrorCode::kIoError:
    case rra::ErrorCode::kMalformedProbabilities:
    case rra::ErrorCode::kNonpositiveCapacity:
    case rra::ErrorCode::kMissingNullType:
    case rra::ErrorCode::kMissingNullAction:
    case rra::ErrorCode::kDimensionMismatch:
    case rra::ErrorCode::kIndexOutOfRange:
    case rra::ErrorCode::kInvalidArgument:
      return kExitConfig;
    case rra::ErrorCode::kNumericalFailure:
    case rra::ErrorCode::kOracleFailure:
      return kExitNumerical;
    default:
      return kExitFailure;
  }
}

struct GenArgs {
  rra::SyntheticParams params;
  std::uint64_t seed = 1;
  double xi = 1.0 / 200.0;
  std::string out;
};

struct SolveArgs {
  std::string instance;
  std::optional<double> xi;
  std::string method = "colgen";
  std::string out;
  std::string lp_dump;
};

struct RunArgs {
  std::string config;
};

struct VerifyArgs {
  std::string level = "quick";
  std::vector<std::string> only;
  bool corrupt = false;
};

int cmd_gen(const GenArgs& a) {
  const rra::SyntheticInstance syn = rra::generate_synthetic_instance(a.params, a.seed);
  const rra::Instance inst = syn.instance(a.xi);
  if (a.out.empty() || a.out == "-") {
    std::cout << rra::serialize_instance(inst);
  } else {
    rra::save_instance(inst, a.out);
    fmt::print("wrote {} ({} types, {} actions, {} resources)\n", a.out, inst.num_types(), inst.num_actions(),
               inst.num_resources());
  }
  return kExitOk;
}

int cmd_solve(const SolveArgs& a) {
  rra::ExperimentConfig cfg;
  cfg.source = rra::InstanceSource::kFile;
  cfg.instance_file = a.instance;
  cfg.xi = a.xi;
  const rra::LoadedInstance loaded = rra::materialize_instance(cfg);
  const rra::Instance& inst = loaded.instance;

  rra::SteadyStateResult res;
  if (a.method == "dense") {
    const rra::MeanTable means = rra::MeanTable::from_instance(inst);
    if (!a.lp_dump.empty()) {
      std::ofstream dump(a.lp_dump);
      rra::write_lp_text(rra::build_lp_s(means, inst.arrival_probs(), inst.capacities()).lp, dump);
    }
    res = rra::solve_lp_s_dense(means, inst.arrival_probs(), inst.capacities());
  } else if (a.method == "colgen") {
    const rra::PolicyContext ctx = rra::make_context(loaded);
    res = rra::solve_benchmark(loaded, ctx);
  } else {
    throw rra::Error(rra::ErrorCode::kConfigError, fmt::format("unknown method '{}'", a.method));
  }

  nlohmann::json doc;
  doc["lambda_star"] = res.lambda;
  doc["method"] = a.method;
  doc["duality_gap"] = res.solution.duality_gap;
  doc["rounds"] = res.rounds;
  doc["columns"] = res.columns;
  doc["duals"] = {{"alpha", res.duals.alpha}, {"beta", res.duals.beta}, {"rho", res.duals.rho}};
  nlohmann::json plan = nlohmann::json::array();
  for (const auto& e : res.plan) plan.push_back({{"type", e.type}, {"action", e.action}, {"value", e.value}});
  doc["plan"] = std::move(plan);
  const std::string text = doc.dump(1) + "\n";
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    std::ofstream out(a.out);
    out << text;
    if (!out) throw rra::Error(rra::ErrorCode::kIoError, fmt::format("cannot write {}", a.out));
    fmt::print("lambda_* = {:.12g}\n", res.lambda);
  }
  return kExitOk;
}

int cmd_run(const RunArgs& a) {
  const rra::ExperimentConfig cfg = rra::load_experiment_config(a.config);
  const rra::ExperimentResult res = rra::run_experiment(cfg);
  fmt::print("policy {}  lambda_* = {:.6g}  seeds = {}  T = {}\n", cfg.policy, res.lambda_star, res.seeds.size(),
             cfg.horizon);
  for (std::size_t i = 0; i < res.reward_duals.size(); ++i)
    fmt::print("  final reward gap {}: {:.5f}\n", i + 1, res.mean_final_gap(i));
  fmt::print("  final normalized reward: {:.6f}\n", res.mean_final_normalized());
  fmt::print("  capacity violations: {}\n", res.total_violations());
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a) {
  rra::VerifyOptions opt;
  if (a.level == "quick") {
    opt.level = rra::VerifyLevel::kQuick;
  } else if (a.level == "full") {
    opt.level = rra::VerifyLevel::kFull;
  } else {
    throw rra::Error(rra::ErrorCode::kConfigError, fmt::format("unknown level '{}'", a.level));
  }
  opt.only = a.only;
  opt.corrupt_lp_tolerance = a.corrupt;
  opt.on_result = [](const rra::CriterionResult& r) { fmt::print("{}\n", rra::format_result(r)); };
  const auto results = rra::run_verify_suite(opt);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  fmt::print("{} of {} checks passed\n", results.size() - failed, results.size());
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online reusable resource allocation experiments"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic assortment instance");
  g->add_option("--seed", gen.seed, "Instance seed");
  g->add_option("--xi", gen.xi, "Capacity scale: c = a_max / xi");
  g->add_option("--n-resources", gen.params.n_resources);
  g->add_option("--n-types", gen.params.n_types);
  g->add_option("--max-assortment", gen.params.max_assortment);
  g->add_option("--feature-dim", gen.params.feature_dim);
  g->add_option("--price-min", gen.params.price_min);
  g->add_option("--price-max", gen.params.price_max);
  g->add_option("--utility-scale", gen.params.utility_scale);
  g->add_option("--duration-cap", gen.params.duration_cap);
  g->add_option("-o,--out", gen.out, "Output file (stdout when omitted)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve-lp", "Solve the steady-state benchmark of an instance");
  s->add_option("instance", solve.instance, "Instance JSON file")->required();
  s->add_option("--xi", solve.xi, "Override capacities with a_max / xi");
  s->add_option("--method", solve.method, "colgen or dense")->check(CLI::IsMember({"colgen", "dense"}));
  s->add_option("-o,--out", solve.out, "Result JSON (stdout when omitted)");
  s->add_option("--lp-dump", solve.lp_dump, "Write the dense program in text form (dense method)");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run an experiment configuration");
  r->add_option("config", run.config, "Experiment JSON file")->required();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run the verification suite");
  v->add_option("--level", verify.level, "quick or full");
  v->add_option("--only", verify.only, "Run only the named checks");
  v->add_flag("--corrupt-lp-tolerance", verify.corrupt, "Inject a broken LP tolerance (negative test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_solve(solve);
    if (*r) return cmd_run(run);
    if (*v) return cmd_verify(verify);
  } catch (const rra::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
