#include "rra/lp_builders.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace rra {

namespace {

constexpr double kMaxTableEntries = 5e7;
constexpr double kMaxLpECoefficients = 1e7;

void check_dims(const MeanTable& means, std::span<const double> p,
                std::span<const double> capacities) {
  if (p.size() != means.num_types())
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("distribution has {} entries for {} types", p.size(), means.num_types()));
  if (capacities.size() != means.num_resources())
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} capacities for {} resources", capacities.size(),
                            means.num_resources()));
}

}  // namespace

MeanTable::MeanTable(std::size_t n_rewards, std::size_t n_resources, std::size_t n_types,
                     std::size_t n_actions)
    : n_rewards_(n_rewards), n_resources_(n_resources), n_types_(n_types), n_actions_(n_actions) {
  const double entries = static_cast<double>(n_types) * static_cast<double>(n_actions) *
                         static_cast<double>(n_rewards + n_resources);
  if (entries > kMaxTableEntries)
    throw Error(ErrorCode::kTooLarge, fmt::format("mean table would hold {} entries", entries));
  w_.assign(n_types * n_actions * n_rewards, 0.0);
  v_.assign(n_types * n_actions * n_resources, 0.0);
}

MeanTable MeanTable::from_instance(const Instance& instance) {
  MeanTable t(instance.num_rewards(), instance.num_resources(), instance.num_types(),
              instance.num_actions());
  for (TypeIndex j = 0; j < instance.num_types(); ++j) {
    if (j == instance.null_type()) continue;
    for (ActionIndex k = 0; k < instance.num_actions(); ++k) {
      if (k == instance.null_action()) continue;
      instance.outcomes().mean_outcome(j, k, t.rewards(j, k), t.volumes(j, k));
    }
  }
  return t;
}

TailTable TailTable::from_instance(const Instance& instance, int d_max) {
  if (d_max < 1) throw Error(ErrorCode::kInvalidArgument, "d_max must be >= 1");
  TailTable t;
  t.n_resources_ = instance.num_resources();
  t.n_actions_ = instance.num_actions();
  t.d_max_ = d_max;
  const std::size_t block = t.n_resources_ * static_cast<std::size_t>(d_max);
  const double entries = static_cast<double>(instance.num_types()) * t.n_actions_ * block;
  if (entries > kMaxTableEntries)
    throw Error(ErrorCode::kTooLarge, fmt::format("tail table would hold {} entries", entries));
  t.data_.assign(instance.num_types() * t.n_actions_ * block, 0.0);
  for (TypeIndex j = 0; j < instance.num_types(); ++j) {
    if (j == instance.null_type()) continue;
    for (ActionIndex k = 0; k < instance.num_actions(); ++k) {
      if (k == instance.null_action()) continue;
      std::span<double> out(t.data_.data() + (j * t.n_actions_ + k) * block, block);
      instance.outcomes().mean_tail(j, k, d_max, out);
    }
  }
  return t;
}

BuiltLpS build_lp_s(const MeanTable& means, std::span<const double> p,
                    std::span<const double> capacities) {
  check_dims(means, p, capacities);
  const std::size_t J = means.num_types(), K = means.num_actions();
  BuiltLpS out;
  LinearProgram& lp = out.lp;
  LpSLayout& L = out.layout;
  L.n_types = J;
  L.n_actions = K;
  L.lambda = lp.add_variable(1.0, /*nonnegative=*/false, "lambda");
  L.y.resize(J * K);
  for (TypeIndex j = 0; j < J; ++j)
    for (ActionIndex k = 0; k < K; ++k)
      L.y[j * K + k] = lp.add_variable(0.0, true, fmt::format("y_{}_{}", j, k));

  L.reward_rows = lp.num_rows();
  for (std::size_t i = 0; i < means.num_rewards(); ++i) {
    const std::size_t r = lp.add_row(RowSense::kGreaterEqual, 0.0, fmt::format("reward_{}", i));
    lp.add_coefficient(r, L.lambda, -1.0);
    for (TypeIndex j = 0; j < J; ++j) {
      if (p[j] == 0.0) continue;
      for (ActionIndex k = 0; k < K; ++k) lp.add_coefficient(r, L.y[j * K + k], p[j] * means.reward(i, j, k));
    }
  }
  L.resource_rows = lp.num_rows();
  for (std::size_t i = 0; i < means.num_resources(); ++i) {
    const std::size_t r =
        lp.add_row(RowSense::kLessEqual, capacities[i], fmt::format("resource_{}", i));
    for (TypeIndex j = 0; j < J; ++j) {
      if (p[j] == 0.0) continue;
      for (ActionIndex k = 0; k < K; ++k) lp.add_coefficient(r, L.y[j * K + k], p[j] * means.volume(i, j, k));
    }
  }
  L.type_rows = lp.num_rows();
  for (TypeIndex j = 0; j < J; ++j) {
    const std::size_t r = lp.add_row(RowSense::kLessEqual, 1.0, fmt::format("type_{}", j));
    for (ActionIndex k = 0; k < K; ++k) lp.add_coefficient(r, L.y[j * K + k], 1.0);
  }
  return out;
}

BuiltLpS build_lp_rs(std::span<const double> p_hat, const MeanTable& means,
                     std::span<const double> capacities) {
  double total = 0.0;
  for (double x : p_hat) {
    if (x < 0.0) throw Error(ErrorCode::kMalformedProbabilities, "negative empirical frequency");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorCode::kMalformedProbabilities, "empirical distribution does not sum to 1");
  return build_lp_s(means, p_hat, capacities);
}

std::vector<double> empirical_distribution(std::span<const TypeIndex> window,
                                           std::size_t n_types) {
  if (window.empty()) throw Error(ErrorCode::kEmptySampleWindow, "no arrivals in sample window");
  std::vector<std::size_t> counts(n_types, 0);
  for (TypeIndex j : window) {
    if (j >= n_types) throw Error(ErrorCode::kIndexOutOfRange, "type index in window");
    ++counts[j];
  }
  std::vector<double> p(n_types);
  const double n = static_cast<double>(window.size());
  for (std::size_t j = 0; j < n_types; ++j) p[j] = static_cast<double>(counts[j]) / n;
  return p;
}

BuiltLpE build_lp_e(const MeanTable& means, const TailTable& tails, std::span<const double> p,
                    std::span<const double> capacities, TimeStep horizon) {
  check_dims(means, p, capacities);
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  const std::size_t T = static_cast<std::size_t>(horizon);
  const std::size_t J = means.num_types(), K = means.num_actions();
  const std::size_t Ic = means.num_resources();
  const double size = static_cast<double>(T) * Ic * J * K;
  if (size > kMaxLpECoefficients)
    throw Error(ErrorCode::kTooLarge, fmt::format("horizon-expanded program needs {} coefficients", size));
  const int d_max = tails.d_max();

  BuiltLpE out;
  LinearProgram& lp = out.lp;
  LpELayout& L = out.layout;
  L.horizon = T;
  L.n_types = J;
  L.n_actions = K;
  L.lambda = lp.add_variable(1.0, false, "lambda");
  L.x_begin = lp.num_variables();
  for (std::size_t t = 1; t <= T; ++t)
    for (TypeIndex j = 0; j < J; ++j)
      for (ActionIndex k = 0; k < K; ++k) lp.add_variable(0.0, true, fmt::format("x_{}_{}_{}", j, k, t));
  auto x = [&](std::size_t t, TypeIndex j, ActionIndex k) {
    return L.x_begin + ((t - 1) * J + j) * K + k;
  };

  L.reward_rows = lp.num_rows();
  for (std::size_t i = 0; i < means.num_rewards(); ++i) {
    const std::size_t r = lp.add_row(RowSense::kGreaterEqual, 0.0, fmt::format("reward_{}", i));
    lp.add_coefficient(r, L.lambda, -static_cast<double>(T));
    for (std::size_t t = 1; t <= T; ++t)
      for (TypeIndex j = 0; j < J; ++j) {
        if (p[j] == 0.0) continue;
        for (ActionIndex k = 0; k < K; ++k) lp.add_coefficient(r, x(t, j, k), p[j] * means.reward(i, j, k));
      }
  }
  L.resource_rows = lp.num_rows();
  for (std::size_t t = 1; t <= T; ++t) {
    for (std::size_t i = 0; i < Ic; ++i) {
      const std::size_t r =
          lp.add_row(RowSense::kLessEqual, capacities[i], fmt::format("resource_{}_{}", i, t));
      const std::size_t first = t > static_cast<std::size_t>(d_max) ? t - d_max + 1 : 1;
      for (std::size_t tau = first; tau <= t; ++tau) {
        const int s = static_cast<int>(t - tau + 1);
        for (TypeIndex j = 0; j < J; ++j) {
          if (p[j] == 0.0) continue;
          for (ActionIndex k = 0; k < K; ++k) lp.add_coefficient(r, x(tau, j, k), p[j] * tails.tail(i, j, k, s));
        }
      }
    }
  }
  L.type_rows = lp.num_rows();
  for (std::size_t t = 1; t <= T; ++t)
    for (TypeIndex j = 0; j < J; ++j) {
      const std::size_t r = lp.add_row(RowSense::kLessEqual, 1.0, fmt::format("type_{}_{}", j, t));
      for (ActionIndex k = 0; k < K; ++k) lp.add_coefficient(r, x(t, j, k), 1.0);
    }
  return out;
}

BuiltDual build_lp_s_dual(const MeanTable& means, std::span<const double> p,
                          std::span<const double> capacities) {
  check_dims(means, p, capacities);
  const std::size_t J = means.num_types(), K = means.num_actions();
  BuiltDual out{LinearProgram(ObjectiveSense::kMinimize), {}};
  LinearProgram& lp = out.lp;
  DualLayout& L = out.layout;
  for (std::size_t i = 0; i < means.num_resources(); ++i)
    L.alpha.push_back(lp.add_variable(capacities[i], true, fmt::format("alpha_{}", i)));
  for (TypeIndex j = 0; j < J; ++j) L.beta.push_back(lp.add_variable(p[j], true, fmt::format("beta_{}", j)));
  for (std::size_t i = 0; i < means.num_rewards(); ++i)
    L.rho.push_back(lp.add_variable(0.0, true, fmt::format("rho_{}", i)));

  for (TypeIndex j = 0; j < J; ++j)
    for (ActionIndex k = 0; k < K; ++k) {
      const std::size_t r = lp.add_row(RowSense::kGreaterEqual, 0.0, fmt::format("pair_{}_{}", j, k));
      lp.add_coefficient(r, L.beta[j], 1.0);
      for (std::size_t i = 0; i < means.num_resources(); ++i) lp.add_coefficient(r, L.alpha[i], means.volume(i, j, k));
      for (std::size_t i = 0; i < means.num_rewards(); ++i) lp.add_coefficient(r, L.rho[i], -means.reward(i, j, k));
    }
  const std::size_t r = lp.add_row(RowSense::kGreaterEqual, 1.0, "rho_sum");
  for (std::size_t idx : L.rho) lp.add_coefficient(r, idx, 1.0);
  return out;
}

BuiltDual build_lp_rs_dual(std::span<const double> p_hat, const MeanTable& means,
                           std::span<const double> capacities) {
  return build_lp_s_dual(means, p_hat, capacities);
}

BuiltDual build_lp_e_dual(const MeanTable& means, const TailTable& tails,
                          std::span<const double> p, std::span<const double> capacities,
                          TimeStep horizon) {
  check_dims(means, p, capacities);
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  const std::size_t T = static_cast<std::size_t>(horizon);
  const std::size_t J = means.num_types(), K = means.num_actions();
  const std::size_t Ic = means.num_resources();
  const double size = static_cast<double>(T) * Ic * J * K;
  if (size > kMaxLpECoefficients)
    throw Error(ErrorCode::kTooLarge, fmt::format("horizon-expanded dual needs {} coefficients", size));
  const std::size_t d_max = static_cast<std::size_t>(tails.d_max());

  BuiltDual out{LinearProgram(ObjectiveSense::kMinimize), {}};
  LinearProgram& lp = out.lp;
  DualLayout& L = out.layout;
  for (std::size_t t = 1; t <= T; ++t)
    for (std::size_t i = 0; i < Ic; ++i)
      L.alpha.push_back(lp.add_variable(capacities[i], true, fmt::format("alpha_{}_{}", i, t)));
  for (std::size_t t = 1; t <= T; ++t)
    for (TypeIndex j = 0; j < J; ++j)
      L.beta.push_back(lp.add_variable(p[j], true, fmt::format("beta_{}_{}", j, t)));
  for (std::size_t i = 0; i < means.num_rewards(); ++i)
    L.rho.push_back(lp.add_variable(0.0, true, fmt::format("rho_{}", i)));

  for (std::size_t t = 1; t <= T; ++t)
    for (TypeIndex j = 0; j < J; ++j)
      for (ActionIndex k = 0; k < K; ++k) {
        const std::size_t r =
            lp.add_row(RowSense::kGreaterEqual, 0.0, fmt::format("pair_{}_{}_{}", j, k, t));
        lp.add_coefficient(r, L.beta[(t - 1) * J + j], 1.0);
        const std::size_t last = std::min(t + d_max - 1, T);
        for (std::size_t tau = t; tau <= last; ++tau) {
          const int s = static_cast<int>(tau - t + 1);
          for (std::size_t i = 0; i < Ic; ++i)
            lp.add_coefficient(r, L.alpha[(tau - 1) * Ic + i], tails.tail(i, j, k, s));
        }
        for (std::size_t i = 0; i < means.num_rewards(); ++i)
          lp.add_coefficient(r, L.rho[i], -means.reward(i, j, k));
      }
  const std::size_t r = lp.add_row(RowSense::kGreaterEqual, 1.0, "rho_sum");
  for (std::size_t idx : L.rho) lp.add_coefficient(r, idx, static_cast<double>(T));
  return out;
}

SteadyStateDuals recover_lp_s_duals(const BuiltLpS& built, const LpSolution& solution,
                                    const MeanTable& means, std::span<const double> p) {
  if (!solution.optimal())
    throw Error(ErrorCode::kInvalidArgument, "duals requested from a non-optimal solution");
  const LpSLayout& L = built.layout;
  SteadyStateDuals d;
  for (std::size_t i = 0; i < means.num_rewards(); ++i)
    d.rho.push_back(std::max(0.0, -solution.duals[L.reward_rows + i]));
  for (std::size_t i = 0; i < means.num_resources(); ++i)
    d.alpha.push_back(std::max(0.0, solution.duals[L.resource_rows + i]));
  for (TypeIndex j = 0; j < L.n_types; ++j) {
    const double shadow = std::max(0.0, solution.duals[L.type_rows + j]);
    if (p[j] > 0.0) {
      d.beta.push_back(shadow / p[j]);
      continue;
    }
    double need = 0.0;
    for (ActionIndex k = 0; k < L.n_actions; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < means.num_rewards(); ++i) s += means.reward(i, j, k) * d.rho[i];
      for (std::size_t i = 0; i < means.num_resources(); ++i) s -= means.volume(i, j, k) * d.alpha[i];
      need = std::max(need, s);
    }
    d.beta.push_back(need);
  }
  return d;
}

double lp_s_dual_violation(const BuiltDual& dual, const SteadyStateDuals& point) {
  std::vector<double> x(dual.lp.num_variables(), 0.0);
  for (std::size_t i = 0; i < point.alpha.size(); ++i) x[dual.layout.alpha[i]] = point.alpha[i];
  for (std::size_t j = 0; j < point.beta.size(); ++j) x[dual.layout.beta[j]] = point.beta[j];
  for (std::size_t i = 0; i < point.rho.size(); ++i) x[dual.layout.rho[i]] = point.rho[i];
  return dual.lp.max_violation(x);
}

}  // namespace rra
