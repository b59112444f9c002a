#pragma once

#include <span>
#include <vector>

#include "rra/lp.h"
#include "rra/model.h"

namespace rra {

/// Dense table of mean rewards w_{ijk} and volumes v_{ijk} for every (j, k).
class MeanTable {
 public:
  MeanTable(std::size_t n_rewards, std::size_t n_resources, std::size_t n_types,
            std::size_t n_actions);

  /// Materializes every mean of `instance`. Throws kTooLarge above 5e7 entries.
  static MeanTable from_instance(const Instance& instance);

  std::size_t num_rewards() const { return n_rewards_; }
  std::size_t num_resources() const { return n_resources_; }
  std::size_t num_types() const { return n_types_; }
  std::size_t num_actions() const { return n_actions_; }

  double reward(std::size_t i, TypeIndex j, ActionIndex k) const {
    return w_[(j * n_actions_ + k) * n_rewards_ + i];
  }
  double volume(std::size_t i, TypeIndex j, ActionIndex k) const {
    return v_[(j * n_actions_ + k) * n_resources_ + i];
  }
  std::span<const double> rewards(TypeIndex j, ActionIndex k) const {
    return {w_.data() + (j * n_actions_ + k) * n_rewards_, n_rewards_};
  }
  std::span<const double> volumes(TypeIndex j, ActionIndex k) const {
    return {v_.data() + (j * n_actions_ + k) * n_resources_, n_resources_};
  }
  std::span<double> rewards(TypeIndex j, ActionIndex k) {
    return {w_.data() + (j * n_actions_ + k) * n_rewards_, n_rewards_};
  }
  std::span<double> volumes(TypeIndex j, ActionIndex k) {
    return {v_.data() + (j * n_actions_ + k) * n_resources_, n_resources_};
  }

 private:
  std::size_t n_rewards_, n_resources_, n_types_, n_actions_;
  std::vector<double> w_;
  std::vector<double> v_;
};

/// E[A_{ijk} 1(D_{ijk} >= s)] for s = 1..d_max.
class TailTable {
 public:
  static TailTable from_instance(const Instance& instance, int d_max);

  int d_max() const { return d_max_; }
  double tail(std::size_t i, TypeIndex j, ActionIndex k, int s) const {
    return data_[((j * n_actions_ + k) * n_resources_ + i) * d_max_ + (s - 1)];
  }

 private:
  std::size_t n_resources_ = 0, n_actions_ = 0;
  int d_max_ = 0;
  std::vector<double> data_;
};

/// Variable and row positions of a steady-state program.
struct LpSLayout {
  std::size_t n_types = 0;
  std::size_t n_actions = 0;
  std::size_t lambda = 0;
  std::vector<std::size_t> y;  // indexed by j * n_actions + k
  std::size_t reward_rows = 0;    // first reward row
  std::size_t resource_rows = 0;  // first resource row
  std::size_t type_rows = 0;      // first type row
};

struct BuiltLpS {
  LinearProgram lp;
  LpSLayout layout;
};

/// max lambda s.t. sum p_j w_ijk y_jk >= lambda, sum p_j v_ijk y_jk <= c_i,
/// sum_k y_jk <= 1, y >= 0.
BuiltLpS build_lp_s(const MeanTable& means, std::span<const double> p,
                    std::span<const double> capacities);

/// Same program with the empirical distribution in place of p.
BuiltLpS build_lp_rs(std::span<const double> p_hat, const MeanTable& means,
                     std::span<const double> capacities);

/// Frequencies of each type in `window`. Throws kEmptySampleWindow.
std::vector<double> empirical_distribution(std::span<const TypeIndex> window,
                                           std::size_t n_types);

struct LpELayout {
  std::size_t horizon = 0;
  std::size_t n_types = 0;
  std::size_t n_actions = 0;
  std::size_t lambda = 0;
  std::size_t x_begin = 0;  // x_{jk}(t) at x_begin + ((t-1) * J + j) * K + k
  std::size_t reward_rows = 0;
  std::size_t resource_rows = 0;  // (t-1) * |I_c| + i
  std::size_t type_rows = 0;      // (t-1) * |J| + j
};

struct BuiltLpE {
  LinearProgram lp;
  LpELayout layout;
};

/// Horizon-expanded program. Throws kTooLarge when T |I_c| |J| |K| > 1e7.
BuiltLpE build_lp_e(const MeanTable& means, const TailTable& tails, std::span<const double> p,
                    std::span<const double> capacities, TimeStep horizon);

/// Positions of the dual variables (alpha over resources, beta over types,
/// rho over rewards) in a dual program. For the horizon-expanded dual alpha
/// and beta carry a time index: alpha[(t-1) * |I_c| + i], beta[(t-1) * |J| + j].
struct DualLayout {
  std::vector<std::size_t> alpha;
  std::vector<std::size_t> beta;
  std::vector<std::size_t> rho;
};

struct BuiltDual {
  LinearProgram lp;
  DualLayout layout;
};

/// min sum_j p_j beta_j + sum_i c_i alpha_i subject to
/// beta_j + sum_i v_ijk alpha_i - sum_i w_ijk rho_i >= 0 and sum rho >= 1.
BuiltDual build_lp_s_dual(const MeanTable& means, std::span<const double> p,
                          std::span<const double> capacities);
BuiltDual build_lp_rs_dual(std::span<const double> p_hat, const MeanTable& means,
                           std::span<const double> capacities);
BuiltDual build_lp_e_dual(const MeanTable& means, const TailTable& tails,
                          std::span<const double> p, std::span<const double> capacities,
                          TimeStep horizon);

/// Dual prices recovered from a solved steady-state program, expressed in the
/// variables of build_lp_s_dual. beta_j is the type-row shadow price divided
/// by p_j; for p_j = 0 it is the smallest feasible value.
struct SteadyStateDuals {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> rho;
};

SteadyStateDuals recover_lp_s_duals(const BuiltLpS& built, const LpSolution& solution,
                                    const MeanTable& means, std::span<const double> p);

/// Evaluates a dual point against build_lp_s_dual's constraints; returns the
/// largest violation.
double lp_s_dual_violation(const BuiltDual& dual, const SteadyStateDuals& point);

}  // namespace rra
