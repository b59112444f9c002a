#include "rra/verify.h"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>

#include "rra/assortment.h"
#include "rra/colgen.h"
#include "rra/experiment.h"
#include "rra/lp_builders.h"
#include "rra/mwu.h"
#include "rra/oracle.h"
#include "rra/random_instance.h"

namespace rra {

namespace {

// Primal and dual optima of one audited program.
struct DualityEntry {
  std::string label;
  double primal = 0.0;
  double dual = 0.0;
};

class Suite {
 public:
  explicit Suite(const VerifyOptions& options) : opt_(options), lp_(audit_lp_options(options)) {}

  std::vector<CriterionResult> run();

 private:
  using Check = CriterionResult (Suite::*)();
  bool full() const { return opt_.level == VerifyLevel::kFull; }

  // Solves `lp` and its explicit dual program and records both optima.
  LpSolution audited(const std::string& label, const LinearProgram& primal, const LinearProgram* dual);

  CriterionResult gap_instance();
  CriterionResult sandwich_sweep();
  CriterionResult dp_sweep();
  CriterionResult mwu_regret();
  CriterionResult strong_duality();
  CriterionResult assortment_oracle_check();
  CriterionResult colgen_equivalence();
  CriterionResult capacity_monotonicity();
  CriterionResult imwu_tracks_osa();
  CriterionResult type_count_independence();
  CriterionResult hard_feasibility();

  const ExperimentResult& experiment(const std::string& policy, double xi, std::size_t n_types);

  VerifyOptions opt_;
  LpOptions lp_;
  std::vector<DualityEntry> duality_;
  std::vector<std::string> duality_errors_;
  std::map<std::tuple<std::string, double, std::size_t>, ExperimentResult> runs_;
};

LpSolution Suite::audited(const std::string& label, const LinearProgram& primal, const LinearProgram* dual) {
  LpSolution p;
  try {
    p = solve_lp(primal, lp_);
  } catch (const Error& e) {
    duality_errors_.push_back(fmt::format("{}: {}", label, e.what()));
    throw;
  }
  DualityEntry entry{label, p.objective, p.dual_objective};
  if (dual) {
    try {
      const LpSolution d = solve_lp(*dual, lp_);
      entry.dual = d.objective;
    } catch (const Error& e) {
      duality_errors_.push_back(fmt::format("{} (dual): {}", label, e.what()));
      throw;
    }
  }
  duality_.push_back(entry);
  return p;
}

// ---------------------------------------------------------------------------
// Benchmarks on small instances

CriterionResult Suite::gap_instance() {
  CriterionResult r{"gap-instance-exactness", false, "", 0.0, 1.0};
  const Instance inst = rra::gap_instance(8);
  const MeanTable means = MeanTable::from_instance(inst);
  const TailTable tails = TailTable::from_instance(inst, 8);
  const auto s = build_lp_s(means, inst.arrival_probs(), inst.capacities());
  const auto sd = build_lp_s_dual(means, inst.arrival_probs(), inst.capacities());
  const auto e = build_lp_e(means, tails, inst.arrival_probs(), inst.capacities(), 4);
  const auto ed = build_lp_e_dual(means, tails, inst.arrival_probs(), inst.capacities(), 4);
  const double ts = 4.0 * audited("gap LP-S", s.lp, &sd.lp).objective;
  const double te = 4.0 * audited("gap LP-E", e.lp, &ed.lp).objective;
  r.passed = std::abs(ts - 3.0) <= 1e-9 && std::abs(te - 4.0) <= 1e-9 && std::abs((te - ts) - 1.0) <= 1e-9;
  r.detail = fmt::format("T*lambda_S = {:.12g}, T*opt(LP-E) = {:.12g}, gap = {:.12g} (expected 3, 4, d/8 = 1)", ts,
                         te, te - ts);
  return r;
}

CriterionResult Suite::sandwich_sweep() {
  CriterionResult r{"expanded-vs-steady-state-sandwich", true, "", 0.0, 120.0};
  Rng rng = make_stream(20'240, 1);
  std::size_t failures = 0;
  double worst_upper = -1e300, worst_lower = -1e300;
  for (int n = 0; n < 100; ++n) {
    RandomTabularParams params = small_params();
    params.n_types = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    params.n_actions = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    params.n_rewards = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    params.n_resources = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    const Instance inst = random_tabular_instance(params, rng);
    const TimeStep T = std::uniform_int_distribution<TimeStep>(1, 20)(rng);
    const Bounds b = compute_bounds(inst);
    const MeanTable means = MeanTable::from_instance(inst);
    const TailTable tails = TailTable::from_instance(inst, std::max(1, b.d_max));
    const auto s = build_lp_s(means, inst.arrival_probs(), inst.capacities());
    const auto sd = build_lp_s_dual(means, inst.arrival_probs(), inst.capacities());
    const auto e = build_lp_e(means, tails, inst.arrival_probs(), inst.capacities(), T);
    const auto ed = build_lp_e_dual(means, tails, inst.arrival_probs(), inst.capacities(), T);
    const double ts = static_cast<double>(T) * audited(fmt::format("sweep {} LP-S", n), s.lp, &sd.lp).objective;
    const double te = static_cast<double>(T) * audited(fmt::format("sweep {} LP-E", n), e.lp, &ed.lp).objective;
    const double upper = ts - te;                      // must be <= 0
    const double lower = (te - b.d_max * b.w_max) - ts;  // must be <= 0
    worst_upper = std::max(worst_upper, upper);
    worst_lower = std::max(worst_lower, lower);
    if (upper > 1e-8 || lower > 1e-8) ++failures;

    // Sample-average program on a simulated window, for the duality audit.
    std::vector<TypeIndex> window;
    ArrivalSampler sampler(inst.arrival_probs());
    for (TimeStep t = 0; t < std::max<TimeStep>(T, 4); ++t) window.push_back(sampler(rng));
    const auto p_hat = empirical_distribution(window, inst.num_types());
    const auto rs = build_lp_rs(p_hat, means, inst.capacities());
    const auto rsd = build_lp_rs_dual(p_hat, means, inst.capacities());
    audited(fmt::format("sweep {} LP-RS", n), rs.lp, &rsd.lp);
  }
  r.passed = failures == 0;
  r.detail = fmt::format("100 instances, {} violations; max(T*lambda - T*opt(LP-E)) = {:.3g}, "
                         "max(T*opt(LP-E) - d_max*w_max - T*lambda) = {:.3g}",
                         failures, worst_upper, worst_lower);
  return r;
}

CriterionResult Suite::dp_sweep() {
  CriterionResult r{"dp-below-expanded-lp", true, "", 0.0, 120.0};
  Rng rng = make_stream(20'240, 2);
  std::size_t failures = 0;
  double min_margin = 1e300;
  for (int n = 0; n < 50; ++n) {
    RandomTabularParams params = tiny_params();
    params.n_types = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    params.n_actions = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    const Instance inst = random_tabular_instance(params, rng);
    const TimeStep T = std::uniform_int_distribution<TimeStep>(1, 8)(rng);
    const DpValue dp = dp_opt_ipc(inst, T);
    const MeanTable means = MeanTable::from_instance(inst);
    const TailTable tails = TailTable::from_instance(inst, std::max(1, compute_bounds(inst).d_max));
    const auto e = build_lp_e(means, tails, inst.arrival_probs(), inst.capacities(), T);
    const auto ed = build_lp_e_dual(means, tails, inst.arrival_probs(), inst.capacities(), T);
    const double lp = audited(fmt::format("dp sweep {} LP-E", n), e.lp, &ed.lp).objective;
    min_margin = std::min(min_margin, lp - dp.per_step);
    if (lp < dp.per_step - 1e-9) ++failures;
  }
  r.passed = failures == 0;
  r.detail = fmt::format("50 instances, {} violations; min(opt(LP-E) - DP) = {:.3g} per step", failures, min_margin);
  return r;
}

CriterionResult Suite::mwu_regret() {
  CriterionResult r{"mwu-regret-bound", true, "", 0.0, 120.0};
  Rng rng = make_stream(20'240, 3);
  std::size_t violations = 0;
  double min_slack = 1e300;
  for (int n = 0; n < 1000; ++n) {
    const auto dim = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const double B = std::uniform_real_distribution<double>(0.01, 4.0)(rng);
    const auto tau = std::uniform_int_distribution<std::size_t>(1, 2048)(rng);
    const int pattern = n % 4;
    std::vector<std::vector<double>> losses(tau, std::vector<double>(dim));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t s = 0; s < tau; ++s)
      for (std::size_t i = 0; i < dim; ++i) {
        double l = unit(rng);
        if (pattern == 1) l = (i == s % dim) ? 1.0 : -1.0;            // rotating loser
        if (pattern == 2) l = (s % 2 == 0) == (i % 2 == 0) ? 1.0 : -1.0;  // alternating
        if (pattern == 3) l = std::clamp(0.5 * unit(rng) + (i == 0 ? -0.4 : 0.2), -1.0, 1.0);
        losses[s][i] = B * l;
      }
    const RegretReport rep = mwu_regret_harness(losses, B);
    min_slack = std::min(min_slack, rep.slack());
    if (rep.slack() < -1e-12) ++violations;
  }
  r.passed = violations == 0;
  r.detail = fmt::format("1000 sequences, {} violations, min slack {:.4g}", violations, min_slack);
  return r;
}

CriterionResult Suite::strong_duality() {
  CriterionResult r{"strong-duality", true, "", 0.0, 0.0};
  // Programs of its own, so the criterion stands alone when run by name.
  Rng rng = make_stream(20'240, 4);
  for (int n = 0; n < 20; ++n) {
    RandomTabularParams params = small_params();
    const Instance inst = random_tabular_instance(params, rng);
    const MeanTable means = MeanTable::from_instance(inst);
    const TailTable tails = TailTable::from_instance(inst, std::max(1, compute_bounds(inst).d_max));
    const TimeStep T = std::uniform_int_distribution<TimeStep>(1, 20)(rng);
    try {
      const auto s = build_lp_s(means, inst.arrival_probs(), inst.capacities());
      const auto sd = build_lp_s_dual(means, inst.arrival_probs(), inst.capacities());
      audited(fmt::format("duality {} LP-S", n), s.lp, &sd.lp);
      const auto e = build_lp_e(means, tails, inst.arrival_probs(), inst.capacities(), T);
      const auto ed = build_lp_e_dual(means, tails, inst.arrival_probs(), inst.capacities(), T);
      audited(fmt::format("duality {} LP-E", n), e.lp, &ed.lp);
    } catch (const Error&) {
      // Recorded in duality_errors_.
    }
  }
  double worst = 0.0;
  std::string worst_label;
  std::size_t bad = 0;
  for (const auto& e : duality_) {
    const double g = std::abs(e.primal - e.dual);
    if (g > worst) {
      worst = g;
      worst_label = e.label;
    }
    if (!(g <= 1e-6)) ++bad;
  }
  r.passed = bad == 0 && duality_errors_.empty();
  r.detail = fmt::format("{} programs audited, {} gaps above 1e-6, {} solver failures; max |primal - dual| = {:.3g}{}",
                         duality_.size(), bad, duality_errors_.size(), worst,
                         worst_label.empty() ? "" : " at " + worst_label);
  if (!duality_errors_.empty()) r.detail += "; first failure: " + duality_errors_.front();
  return r;
}

// ---------------------------------------------------------------------------
// Assortment layer

CriterionResult Suite::assortment_oracle_check() {
  CriterionResult r{"assortment-oracle-vs-enumeration", true, "", 0.0, 60.0};
  Rng rng = make_stream(20'240, 5);
  std::size_t bad = 0;
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto m = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    const auto cap = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> u(m), rho(m);
    for (auto& x : u) x = std::exp(g(rng));
    for (auto& x : rho) x = std::uniform_real_distribution<double>(-1.0, 2.0)(rng);
    const AssortmentChoice lp = assortment_oracle(u, rho, cap);
    const AssortmentChoice en = enumerate_assortments(u, rho, cap);
    const double attained = assortment_value(u, rho, lp.items);
    const double diff = std::max(std::abs(lp.objective - en.objective), std::abs(attained - en.objective));
    worst = std::max(worst, diff);
    if (diff > 1e-6 || lp.items.size() > cap) ++bad;
  }
  r.passed = bad == 0;
  r.detail = fmt::format("200 instances, {} mismatches, max |LP - enumeration| = {:.3g}", bad, worst);
  return r;
}

CriterionResult Suite::colgen_equivalence() {
  CriterionResult r{"colgen-equals-dense", false, "", 0.0, 60.0};
  SyntheticParams params;
  params.n_types = 20;
  const SyntheticInstance syn = generate_synthetic_instance(params, 7);
  const Instance inst = syn.instance(1.0 / 200.0);
  const MeanTable means = MeanTable::from_instance(inst);
  const SteadyStateResult dense = solve_lp_s_dense(means, inst.arrival_probs(), inst.capacities(), lp_);
  const auto view = std::make_shared<InstanceMeanView>(inst);
  MnlAssortmentKappa kappa(syn.outcomes);
  ColgenOptions co;
  co.lp = lp_;
  const SteadyStateResult cg = solve_lp_s_colgen(*view, inst.arrival_probs(), inst.capacities(), kappa, co);
  duality_.push_back({"colgen master", cg.solution.objective, cg.solution.dual_objective});
  duality_.push_back({"dense LP-S (synthetic)", dense.solution.objective, dense.solution.dual_objective});
  const double diff = std::abs(cg.lambda - dense.lambda);
  r.passed = diff <= 1e-6 && inst.num_actions() == 3473;
  r.detail = fmt::format("|K| = {} (3472 + null), |J| = {}; dense {:.10g}, colgen {:.10g} ({} columns, {} rounds), "
                         "diff {:.3g}",
                         inst.num_actions(), inst.num_types(), dense.lambda, cg.lambda, cg.columns, cg.rounds, diff);
  return r;
}

// ---------------------------------------------------------------------------
// End-to-end experiments

const ExperimentResult& Suite::experiment(const std::string& policy, double xi, std::size_t n_types) {
  const auto key = std::make_tuple(policy, xi, n_types);
  if (auto it = runs_.find(key); it != runs_.end()) return it->second;
  ExperimentConfig c;
  c.source = InstanceSource::kSynthetic;
  c.synthetic.n_types = n_types;
  c.instance_seed = 1;
  c.xi = xi;
  c.policy = policy;
  c.horizon = full() ? 10'000 : 2'000;
  c.seeds.clear();
  for (std::uint64_t s = 1; s <= (full() ? 10u : 3u); ++s) c.seeds.push_back(s);
  c.write_trajectories = false;
  return runs_.emplace(key, run_experiment(c)).first->second;
}

CriterionResult Suite::capacity_monotonicity() {
  CriterionResult r{"capacity-monotonicity", true, "", 0.0, 1800.0};
  const auto& lo = experiment("imwu", 1.0 / 20.0, 1000);
  const auto& hi = experiment("imwu", 1.0 / 200.0, 1000);
  std::string detail;
  bool any_binding = false;
  for (std::size_t i = 0; i < lo.reward_duals.size(); ++i) {
    const double g20 = lo.mean_final_gap(i), g200 = hi.mean_final_gap(i);
    const bool binding = lo.reward_duals[i] > 1e-9 || hi.reward_duals[i] > 1e-9;
    any_binding = any_binding || binding;
    if (binding && !(g200 < g20)) r.passed = false;
    // Revenue is objective 0; the sales objectives follow.
    const bool sign_ok = i == 0 ? (g20 < 0.0 && g200 < 0.0) : (g20 > 0.0 && g200 > 0.0);
    if (!sign_ok) r.passed = false;
    detail += fmt::format("{}obj{}{}: gap {:.4f} (xi=1/20) vs {:.4f} (xi=1/200)", i ? "; " : "", i + 1,
                          binding ? " binding" : "", g20, g200);
  }
  if (!any_binding) r.passed = false;
  r.detail = fmt::format("{} seeds, T = {}; {}", lo.seeds.size(), lo.seeds.front().metrics.horizon(), detail);
  return r;
}

CriterionResult Suite::imwu_tracks_osa() {
  CriterionResult r{"imwu-tracks-osa", false, "", 0.0, 0.0};
  const auto& im = experiment("imwu", 1.0 / 200.0, 1000);
  const auto& os = experiment("osa", 1.0 / 200.0, 1000);
  const double a = im.mean_final_normalized(), b = os.mean_final_normalized();
  const double rel = std::abs(a - b) / b;
  r.passed = rel <= 0.10;
  r.detail = fmt::format("mean final normalized reward: iMWU {:.5f}, OSA {:.5f}, relative difference {:.4f} "
                         "(limit 0.10); lambda_* = {:.5f}",
                         a, b, rel, im.lambda_star);
  return r;
}

CriterionResult Suite::type_count_independence() {
  CriterionResult r{"type-count-independence", true, "", 0.0, 0.0};
  const std::size_t sizes[] = {100, 400, 1000};
  std::vector<const ExperimentResult*> res;
  for (std::size_t n : sizes) res.push_back(&experiment("imwu", 1.0 / 200.0, n));
  std::string detail;
  for (std::size_t i = 0; i < res.front()->reward_duals.size(); ++i) {
    double lo = 1e300, hi = -1e300;
    std::string vals;
    for (std::size_t s = 0; s < res.size(); ++s) {
      const double g = res[s]->mean_final_gap(i);
      lo = std::min(lo, g);
      hi = std::max(hi, g);
      vals += fmt::format("{}{:.4f}", s ? "/" : "", g);
    }
    if (!(hi - lo < 0.05)) r.passed = false;
    detail += fmt::format("{}obj{} gaps {} (range {:.4f})", i ? "; " : "", i + 1, vals, hi - lo);
  }
  r.detail = "|J| = 100/400/1000: " + detail;
  return r;
}

CriterionResult Suite::hard_feasibility() {
  CriterionResult r{"hard-feasibility", true, "", 0.0, 0.0};
  for (const char* policy : {"imwu", "osa", "greedy", "null"})
    for (double xi : {1.0 / 20.0, 1.0 / 200.0}) experiment(policy, xi, 1000);
  std::size_t runs = 0, violations = 0, rejections = 0;
  for (const auto& [key, res] : runs_)
    for (const auto& s : res.seeds) {
      ++runs;
      violations += s.capacity_violations;
      rejections += s.gate_rejections;
    }
  r.passed = violations == 0;
  r.detail = fmt::format("{} episodes across imwu/osa/greedy/null, {} capacity violations, {} gate rejections",
                         runs, violations, rejections);
  return r;
}

std::vector<CriterionResult> Suite::run() {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"gap-instance-exactness", &Suite::gap_instance},
      {"expanded-vs-steady-state-sandwich", &Suite::sandwich_sweep},
      {"dp-below-expanded-lp", &Suite::dp_sweep},
      {"mwu-regret-bound", &Suite::mwu_regret},
      {"assortment-oracle-vs-enumeration", &Suite::assortment_oracle_check},
      {"colgen-equals-dense", &Suite::colgen_equivalence},
      {"strong-duality", &Suite::strong_duality},
      {"capacity-monotonicity", &Suite::capacity_monotonicity},
      {"imwu-tracks-osa", &Suite::imwu_tracks_osa},
      {"type-count-independence", &Suite::type_count_independence},
      {"hard-feasibility", &Suite::hard_feasibility},
  };
  std::vector<CriterionResult> out;
  for (const auto& [name, fn] : checks) {
    if (!opt_.only.empty() && std::find(opt_.only.begin(), opt_.only.end(), name) == opt_.only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = (this->*fn)();
    } catch (const std::exception& e) {
      res.name = name;
      res.passed = false;
      res.detail = fmt::format("threw: {}", e.what());
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (res.time_limit > 0.0 && res.seconds > res.time_limit) {
      res.passed = false;
      res.detail += fmt::format("; exceeded the {:.0f} s limit", res.time_limit);
    }
    if (opt_.on_result) opt_.on_result(res);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace

std::vector<std::string> criterion_names() {
  return {"gap-instance-exactness",  "expanded-vs-steady-state-sandwich",
          "dp-below-expanded-lp",    "mwu-regret-bound",
          "assortment-oracle-vs-enumeration", "colgen-equals-dense",
          "strong-duality",          "capacity-monotonicity",
          "imwu-tracks-osa",         "type-count-independence",
          "hard-feasibility"};
}

LpOptions audit_lp_options(const VerifyOptions& options) {
  LpOptions lp;
  if (options.corrupt_lp_tolerance) {
    // Stops pricing while improving columns remain, so the reported optimum
    // is not optimal and its duals are infeasible.
    lp.pricing_tolerance = 0.5;
    lp.throw_on_certificate_failure = false;
  }
  return lp;
}

std::vector<CriterionResult> run_verify_suite(const VerifyOptions& options) {
  Suite suite(options);
  return suite.run();
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{} {} ({:.2f} s): {}", r.passed ? "PASS" : "FAIL", r.name, r.seconds, r.detail);
}

}  // namespace rra
