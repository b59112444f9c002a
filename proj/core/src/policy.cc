#include "rra/policy.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace rra {

// ---------------------------------------------------------------------------
// Schedule and error parameters

PhaseSchedule::PhaseSchedule(int d_max) : d_max_(d_max) {
  if (d_max < 1) throw Error(ErrorCode::kInvalidArgument, "d_max must be >= 1");
}

TimeStep PhaseSchedule::tau(int q) const {
  if (q < -1) throw Error(ErrorCode::kInvalidArgument, "phase index below -1");
  if (q > 60) throw Error(ErrorCode::kTooLarge, "phase index overflows the schedule");
  return static_cast<TimeStep>(d_max_) << (q + 1);
}

int PhaseSchedule::phase_of(TimeStep t) const {
  if (t < 1) throw Error(ErrorCode::kInvalidArgument, "time steps start at 1");
  int q = -1;
  while (t > tau(q)) ++q;
  return q;
}

ErrorParams error_params_for_tau(double tau, double delta, const Bounds& b, std::size_t n_rewards,
                                 std::size_t n_resources) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::kInvalidDelta, fmt::format("delta {} outside (0, 1)", delta));
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  ErrorParams e;
  e.tau_prev = tau;
  const double log_c = std::log(static_cast<double>(n_resources) / delta);
  const double ratio = b.gamma / (b.c_min * tau);
  e.eps_a = 2.0 * std::sqrt(2.0 * ratio * log_c) + 4.0 * ratio * log_c;
  e.eps_b = 2.0 * b.w_max * std::sqrt(std::log(static_cast<double>(n_rewards) / delta) / tau);
  const double log_inv = std::log(1.0 / delta);
  e.eps_c = std::min(2.0 * b.w_max * (std::sqrt(2.0 * log_inv / tau) + 2.0 * log_inv / tau), b.w_max);
  e.eps_d = 8.0 * b.gamma *
            std::sqrt(std::log(static_cast<double>(n_rewards + n_resources) / delta) / tau);
  e.eps_d_bar = e.eps_d / b.c_min;
  // xi log(|I_c| / xi) turns negative only when xi > |I_c|; no discount then.
  e.eta = std::sqrt(std::max(0.0, b.xi * std::log(static_cast<double>(n_resources) / b.xi)));
  return e;
}

ErrorParams error_params(int q, double delta, const Bounds& b, std::size_t n_rewards,
                         std::size_t n_resources) {
  if (q < 0) throw Error(ErrorCode::kInvalidArgument, "error parameters start at phase 0");
  const PhaseSchedule schedule(b.d_max);
  return error_params_for_tau(static_cast<double>(schedule.tau(q - 1)), delta, b, n_rewards,
                              n_resources);
}

// ---------------------------------------------------------------------------
// Context and estimation

PolicyContext PolicyContext::from_instance(const Instance& instance,
                                           std::shared_ptr<const KappaOracle> kappa) {
  PolicyContext ctx;
  ctx.means = std::make_shared<InstanceMeanView>(instance);
  ctx.kappa = kappa ? std::move(kappa) : std::make_shared<EnumerationKappa>(ctx.means);
  ctx.bounds = compute_bounds(instance);
  ctx.capacities = instance.capacities();
  ctx.null_action = instance.null_action();
  return ctx;
}

double estimate_lambda_hat(std::span<const TypeIndex> window, const MeanView& means,
                           std::span<const double> capacities, const KappaOracle& pricing,
                           const ColgenOptions& options) {
  const std::vector<double> p_hat = empirical_distribution(window, means.num_types());
  return solve_lp_s_colgen(means, p_hat, capacities, pricing, options).lambda;
}

// ---------------------------------------------------------------------------
// iMWU

namespace {

ActionIndex lowest_non_null(std::size_t n_actions, ActionIndex null_action) {
  for (ActionIndex k = 0; k < n_actions; ++k)
    if (k != null_action) return k;
  return null_action;
}

}  // namespace

ImwuPolicy::ImwuPolicy(PolicyContext context, ImwuOptions options)
    : ctx_(std::move(context)),
      opt_(options),
      schedule_(std::max(1, ctx_.bounds.d_max)),
      warmup_action_(lowest_non_null(ctx_.means->num_actions(), ctx_.null_action)) {
  if (!(opt_.delta > 0.0 && opt_.delta < 1.0))
    throw Error(ErrorCode::kInvalidDelta, fmt::format("delta {} outside (0, 1)", opt_.delta));
  if (opt_.thinning_override && !(*opt_.thinning_override >= 0.0 && *opt_.thinning_override <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "thinning probability must lie in [0, 1]");
}

double ImwuPolicy::thinning_probability() const {
  return opt_.thinning_override ? *opt_.thinning_override : params_.thinning_probability();
}

void ImwuPolicy::start_phase(int q) {
  if (q < 0) throw Error(ErrorCode::kInvalidArgument, "phase -1 needs no preparation");
  const TimeStep tau_prev = schedule_.tau(q - 1);
  if (static_cast<TimeStep>(types_.size()) < tau_prev)
    throw Error(ErrorCode::kPhaseNotInitialized,
                fmt::format("phase {} needs {} recorded arrivals, have {}", q, tau_prev, types_.size()));
  const TimeStep half = tau_prev / 2;
  mwu_window_ = {1, half};
  estimate_window_ = {half + 1, tau_prev};

  const std::span<const TypeIndex> all(types_);
  lambda_hat_ = estimate_lambda_hat(all.subspan(static_cast<std::size_t>(half),
                                                static_cast<std::size_t>(tau_prev - half)),
                                    *ctx_.means, ctx_.capacities, *ctx_.kappa);
  params_ = error_params(q, opt_.delta, ctx_.bounds, ctx_.means->num_rewards(),
                         ctx_.means->num_resources());

  if (half == 0) {
    // Only possible when d_max = 1 in phase 0: no first-half sample exists,
    // so the set holds the initial uniform weights alone.
    theta_.assign(1, WeightVector::uniform(ctx_.means->num_rewards(), ctx_.means->num_resources()));
    trace_.clear();
  } else {
    VirtualMwuInput in;
    in.types = all.subspan(0, static_cast<std::size_t>(half));
    in.lambda_hat = lambda_hat_;
    in.eps_c = params_.eps_c;
    in.gamma = ctx_.bounds.gamma;
    in.v_max = ctx_.bounds.v_max;
    in.capacities = ctx_.capacities;
    theta_ = virtual_mwu(in, *ctx_.means, *ctx_.kappa, opt_.record_trace ? &trace_ : nullptr);
  }
  phase_ = q;
}

ActionIndex ImwuPolicy::propose(const Arrival& arrival, Rng& rng) {
  if (arrival.t != static_cast<TimeStep>(types_.size()) + 1)
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("arrival at step {} but {} steps recorded", arrival.t, types_.size()));
  types_.push_back(arrival.type);
  const int q = schedule_.phase_of(arrival.t);
  if (q < 0) return warmup_action_;
  if (q != phase_) start_phase(q);

  std::uniform_int_distribution<std::size_t> pick(0, theta_.size() - 1);
  const WeightVector& w = theta_[pick(rng)];
  const ActionIndex k = ctx_.kappa->best_action(w, arrival.type);
  std::bernoulli_distribution keep(thinning_probability());
  return keep(rng) ? k : ctx_.null_action;
}

// ---------------------------------------------------------------------------
// Baselines

OsaPolicy::OsaPolicy(std::size_t n_types, const std::vector<PlanEntry>& plan, double eta_bar,
                     ActionIndex null_action)
    : by_type_(n_types), eta_bar_(eta_bar), null_action_(null_action) {
  if (!(eta_bar >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eta_bar must be >= 0");
  for (const auto& e : plan) {
    if (e.type >= n_types) throw Error(ErrorCode::kIndexOutOfRange, "plan type index");
    if (e.action == null_action || e.value <= 0.0) continue;
    by_type_[e.type].emplace_back(e.action, e.value);
  }
}

ActionIndex OsaPolicy::propose(const Arrival& arrival, Rng& rng) {
  const auto& options = by_type_.at(arrival.type);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * (1.0 + eta_bar_);
  double acc = 0.0;
  for (const auto& [k, y] : options) {
    acc += y;
    if (u < acc) return k;
  }
  return null_action_;
}

GreedyPolicy::GreedyPolicy(PolicyContext context)
    : ctx_(std::move(context)),
      weights_{std::vector<double>(ctx_.means->num_rewards(), 1.0),
               std::vector<double>(ctx_.means->num_resources(), 0.0)} {}

ActionIndex GreedyPolicy::propose(const Arrival& arrival, Rng&) {
  return ctx_.kappa->best_action(weights_, arrival.type);
}

std::unique_ptr<Policy> make_policy(std::string_view name, const PolicyContext& context,
                                    const PolicyParams& params,
                                    const SteadyStateResult* steady_state, std::size_t n_types) {
  if (name == "imwu") return std::make_unique<ImwuPolicy>(context, ImwuOptions{params.delta, {}, false});
  if (name == "null") return std::make_unique<NullPolicy>(context.null_action);
  if (name == "greedy") return std::make_unique<GreedyPolicy>(context);
  if (name == "osa") {
    if (!steady_state) throw Error(ErrorCode::kConfigError, "osa needs the steady-state solution");
    const double eta_bar = params.eta_bar ? *params.eta_bar : std::sqrt(context.bounds.xi);
    return std::make_unique<OsaPolicy>(n_types, steady_state->plan, eta_bar, context.null_action);
  }
  throw Error(ErrorCode::kConfigError, fmt::format("unknown policy '{}'", name));
}

}  // namespace rra
