#include "rra/colgen.h"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <utility>

namespace rra {

SteadyStateResult solve_lp_s_colgen(const MeanView& means, std::span<const double> p,
                                    std::span<const double> capacities,
                                    const KappaOracle& pricing, const ColgenOptions& options) {
  const std::size_t nr = means.num_rewards(), nc = means.num_resources();
  const std::size_t J = means.num_types();
  if (p.size() != J) throw Error(ErrorCode::kDimensionMismatch, "distribution length");
  if (capacities.size() != nc) throw Error(ErrorCode::kDimensionMismatch, "capacities length");

  LinearProgram master(ObjectiveSense::kMaximize);
  const std::size_t lambda = master.add_variable(1.0, false, "lambda");
  const std::size_t reward_rows = master.num_rows();
  for (std::size_t i = 0; i < nr; ++i) {
    const std::size_t r = master.add_row(RowSense::kGreaterEqual, 0.0, fmt::format("reward_{}", i));
    master.add_coefficient(r, lambda, -1.0);
  }
  const std::size_t resource_rows = master.num_rows();
  for (std::size_t i = 0; i < nc; ++i)
    master.add_row(RowSense::kLessEqual, capacities[i], fmt::format("resource_{}", i));
  // Types that never arrive get no row: none of their columns is priced.
  constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);
  std::vector<std::size_t> type_row(J, kNoRow);
  for (TypeIndex j = 0; j < J; ++j)
    if (p[j] > 0.0) type_row[j] = master.add_row(RowSense::kLessEqual, 1.0, fmt::format("type_{}", j));

  SimplexSolver solver(std::move(master), options.lp);
  std::vector<std::pair<TypeIndex, ActionIndex>> column_of;  // by variable index - 1
  std::set<std::pair<TypeIndex, ActionIndex>> present;
  std::vector<double> w(nr), v(nc);
  std::vector<LpEntry> entries;

  SteadyStateResult result;
  WeightVector prices;
  for (std::size_t round = 1;; ++round) {
    result.solution = solver.solve();
    if (!result.solution.optimal())
      throw Error(ErrorCode::kNumericalFailure,
                  fmt::format("master program ended {}", to_string(result.solution.status)));
    const auto& y = result.solution.duals;
    prices.phi.assign(nr, 0.0);
    prices.psi.assign(nc, 0.0);
    for (std::size_t i = 0; i < nr; ++i) prices.phi[i] = std::max(0.0, -y[reward_rows + i]);
    for (std::size_t i = 0; i < nc; ++i) prices.psi[i] = std::max(0.0, y[resource_rows + i]);

    std::size_t added = 0;
    for (TypeIndex j = 0; j < J; ++j) {
      if (p[j] <= 0.0) continue;
      const ActionIndex k = pricing.best_action(prices, j);
      if (k >= means.num_actions())
        throw Error(ErrorCode::kOracleFailure, fmt::format("pricing returned action {}", k));
      if (k == means.null_action() || present.count({j, k})) continue;
      means.means(j, k, w, v);
      double gain = 0.0;
      for (std::size_t i = 0; i < nr; ++i) gain += prices.phi[i] * w[i];
      for (std::size_t i = 0; i < nc; ++i) gain -= prices.psi[i] * v[i];
      const double reduced = p[j] * gain - std::max(0.0, y[type_row[j]]);
      if (reduced <= options.reduced_cost_tolerance) continue;
      entries.clear();
      for (std::size_t i = 0; i < nr; ++i)
        if (w[i] != 0.0) entries.push_back(LpEntry{reward_rows + i, p[j] * w[i]});
      for (std::size_t i = 0; i < nc; ++i)
        if (v[i] != 0.0) entries.push_back(LpEntry{resource_rows + i, p[j] * v[i]});
      entries.push_back(LpEntry{type_row[j], 1.0});
      solver.add_column(0.0, entries, true, fmt::format("y_{}_{}", j, k));
      column_of.emplace_back(j, k);
      present.insert({j, k});
      ++added;
    }
    result.rounds = round;
    if (added == 0) break;
    if (round >= options.max_rounds)
      throw Error(ErrorCode::kNumericalFailure, "column generation hit the round limit");
  }

  const LpSolution& sol = result.solution;
  result.lambda = sol.objective;
  result.columns = column_of.size();
  for (std::size_t c = 0; c < column_of.size(); ++c) {
    const double value = sol.primal[c + 1];
    if (value > 1e-12) result.plan.push_back(PlanEntry{column_of[c].first, column_of[c].second, value});
  }
  result.duals.rho = prices.phi;
  result.duals.alpha = prices.psi;
  result.duals.beta.assign(J, 0.0);
  for (TypeIndex j = 0; j < J; ++j) {
    if (type_row[j] != kNoRow) result.duals.beta[j] = std::max(0.0, sol.duals[type_row[j]]) / p[j];
  }
  return result;
}

SteadyStateResult solve_lp_s_dense(const MeanTable& means, std::span<const double> p,
                                   std::span<const double> capacities, const LpOptions& options) {
  const BuiltLpS built = build_lp_s(means, p, capacities);
  SteadyStateResult result;
  result.solution = solve_lp(built.lp, options);
  if (!result.solution.optimal())
    throw Error(ErrorCode::kNumericalFailure,
                fmt::format("steady-state program ended {}", to_string(result.solution.status)));
  result.lambda = result.solution.objective;
  const auto& L = built.layout;
  for (TypeIndex j = 0; j < L.n_types; ++j)
    for (ActionIndex k = 0; k < L.n_actions; ++k) {
      const double value = result.solution.primal[L.y[j * L.n_actions + k]];
      if (value > 1e-12) result.plan.push_back(PlanEntry{j, k, value});
    }
  result.duals = recover_lp_s_duals(built, result.solution, means, p);
  return result;
}

}  // namespace rra
