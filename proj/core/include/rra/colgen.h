#pragma once

#include <span>
#include <vector>

#include "rra/lp.h"
#include "rra/lp_builders.h"
#include "rra/mwu.h"

namespace rra {

struct ColgenOptions {
  double reduced_cost_tolerance = 1e-9;
  std::size_t max_rounds = 10'000;
  LpOptions lp;
};

/// A positive entry of the steady-state solution.
struct PlanEntry {
  TypeIndex type = 0;
  ActionIndex action = 0;
  double value = 0.0;
};

struct SteadyStateResult {
  double lambda = 0.0;
  std::vector<PlanEntry> plan;  // y*_{jk} > 0
  SteadyStateDuals duals;
  LpSolution solution;          // of the final (master) program
  std::size_t rounds = 0;       // pricing rounds (column generation only)
  std::size_t columns = 0;      // generated columns (column generation only)
};

/// Solves the steady-state program by column generation. The master starts
/// with the lambda column alone; each round prices every type with positive
/// probability through `pricing` using (rho, alpha) as weights and adds the
/// returned column when its reduced cost exceeds the tolerance.
/// Throws kOracleFailure for an out-of-range action and kNumericalFailure
/// when the round limit is hit.
SteadyStateResult solve_lp_s_colgen(const MeanView& means, std::span<const double> p,
                                    std::span<const double> capacities,
                                    const KappaOracle& pricing, const ColgenOptions& options = {});

/// Solves the fully enumerated steady-state program.
SteadyStateResult solve_lp_s_dense(const MeanTable& means, std::span<const double> p,
                                   std::span<const double> capacities,
                                   const LpOptions& options = {});

}  // namespace rra
