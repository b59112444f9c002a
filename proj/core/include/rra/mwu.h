#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rra/model.h"

namespace rra {

/// Read-only access to the mean outcomes (w_{jk}, v_{jk}) that the decision
/// maker observes. It carries no arrival distribution and no horizon.
class MeanView {
 public:
  virtual ~MeanView() = default;
  virtual std::size_t num_rewards() const = 0;
  virtual std::size_t num_resources() const = 0;
  virtual std::size_t num_types() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual ActionIndex null_action() const = 0;
  virtual void means(TypeIndex j, ActionIndex k, std::span<double> reward,
                     std::span<double> volume) const = 0;
};

/// MeanView over an Instance. Null pairs report zero means.
class InstanceMeanView final : public MeanView {
 public:
  explicit InstanceMeanView(const Instance& instance) : instance_(instance) {}
  std::size_t num_rewards() const override { return instance_.num_rewards(); }
  std::size_t num_resources() const override { return instance_.num_resources(); }
  std::size_t num_types() const override { return instance_.num_types(); }
  std::size_t num_actions() const override { return instance_.num_actions(); }
  ActionIndex null_action() const override { return instance_.null_action(); }
  void means(TypeIndex j, ActionIndex k, std::span<double> reward,
             std::span<double> volume) const override;

 private:
  Instance instance_;
};

/// A point on the simplex over reward indices followed by resource indices.
struct WeightVector {
  std::vector<double> phi;  // over I_r
  std::vector<double> psi;  // over I_c

  double total() const;
  static WeightVector uniform(std::size_t n_rewards, std::size_t n_resources);
};

/// The optimization oracle: an action maximizing
/// sum_i phi_i w_ijk - sum_i psi_i v_ijk, lowest index among ties.
class KappaOracle {
 public:
  virtual ~KappaOracle() = default;
  virtual ActionIndex best_action(const WeightVector& weights, TypeIndex j) const = 0;
};

/// Evaluates every action. Suitable for small action sets.
class EnumerationKappa final : public KappaOracle {
 public:
  explicit EnumerationKappa(std::shared_ptr<const MeanView> means);
  ActionIndex best_action(const WeightVector& weights, TypeIndex j) const override;

 private:
  std::shared_ptr<const MeanView> means_;
};

/// Free-function form of the enumeration oracle.
ActionIndex kappa(const WeightVector& weights, TypeIndex j, const MeanView& means);

/// eta(s) = sqrt(log n) / (gamma sqrt(s)).
double learning_rate(std::size_t s, double gamma, std::size_t n);

/// Weights proportional to exp(-eta * exponent), computed with the maximum
/// shifted out so that large exponents cannot overflow.
WeightVector softmax_weights(std::span<const double> gamma_exp, std::span<const double> xi_exp,
                             double eta);

struct MwuTraceRow {
  std::size_t s = 0;
  std::vector<double> gamma_exp;  // Gamma(s)
  std::vector<double> xi_exp;     // Xi(s)
  WeightVector weights;           // (phi(s), psi(s))
  ActionIndex action = 0;         // virtual action chosen at s
};

struct VirtualMwuInput {
  std::span<const TypeIndex> types;  // j(1), ..., j(S)
  double lambda_hat = 0.0;
  double eps_c = 0.0;
  double gamma = 1.0;               // max(w_max, v_max)
  double v_max = 0.0;
  std::span<const double> capacities;
};

/// Replays the recorded arrival types with virtual actions chosen by `kappa`
/// and returns the weights in effect at s = 1..S (the pre-update weights).
/// Throws kEmptySampleWindow for an empty type sequence.
std::vector<WeightVector> virtual_mwu(const VirtualMwuInput& input, const MeanView& means,
                                      const KappaOracle& kappa,
                                      std::vector<MwuTraceRow>* trace = nullptr);

struct RegretReport {
  std::vector<double> average_loss;  // (1/tau) sum_s l_i(s), per coordinate
  double weighted_average = 0.0;     // (1/tau) sum_s <theta(s), l(s)>
  double bound = 0.0;                // 2 B sqrt(log n / tau)
  /// min_i average_loss_i - (weighted_average - bound); nonnegative when the
  /// guarantee holds.
  double slack() const;
};

/// Runs theta(s) proportional to exp(-eta(s) sum_{u<s} l(u)) with
/// eta(s) = sqrt(log n) / (B sqrt(s)) on `losses` (each of length n, entries in
/// [-B, B]) and reports both sides of the regret inequality.
RegretReport mwu_regret_harness(const std::vector<std::vector<double>>& losses, double bound);

}  // namespace rra
