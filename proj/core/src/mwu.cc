#include "rra/mwu.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rra {

void InstanceMeanView::means(TypeIndex j, ActionIndex k, std::span<double> reward,
                             std::span<double> volume) const {
  if (j >= instance_.num_types() || k >= instance_.num_actions())
    throw Error(ErrorCode::kIndexOutOfRange, "mean lookup out of range");
  if (j == instance_.null_type() || k == instance_.null_action()) {
    std::fill(reward.begin(), reward.end(), 0.0);
    std::fill(volume.begin(), volume.end(), 0.0);
    return;
  }
  instance_.outcomes().mean_outcome(j, k, reward, volume);
}

double WeightVector::total() const {
  return std::accumulate(phi.begin(), phi.end(), 0.0) + std::accumulate(psi.begin(), psi.end(), 0.0);
}

WeightVector WeightVector::uniform(std::size_t n_rewards, std::size_t n_resources) {
  const double u = 1.0 / static_cast<double>(n_rewards + n_resources);
  return WeightVector{std::vector<double>(n_rewards, u), std::vector<double>(n_resources, u)};
}

EnumerationKappa::EnumerationKappa(std::shared_ptr<const MeanView> means)
    : means_(std::move(means)) {}

ActionIndex EnumerationKappa::best_action(const WeightVector& weights, TypeIndex j) const {
  return kappa(weights, j, *means_);
}

ActionIndex kappa(const WeightVector& weights, TypeIndex j, const MeanView& means) {
  std::vector<double> w(means.num_rewards()), v(means.num_resources());
  ActionIndex best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (ActionIndex k = 0; k < means.num_actions(); ++k) {
    means.means(j, k, w, v);
    double value = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) value += weights.phi[i] * w[i];
    for (std::size_t i = 0; i < v.size(); ++i) value -= weights.psi[i] * v[i];
    // Relative slack so that ties survive a positive rescaling of the weights.
    const double slack = 1e-12 * (std::abs(value) + std::abs(best_value));
    if (k == 0 || value > best_value + slack) {
      best = k;
      best_value = value;
    }
  }
  return best;
}

double learning_rate(std::size_t s, double gamma, std::size_t n) {
  if (s == 0) throw Error(ErrorCode::kInvalidArgument, "virtual step must be >= 1");
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  return std::sqrt(std::log(static_cast<double>(n))) / (gamma * std::sqrt(static_cast<double>(s)));
}

WeightVector softmax_weights(std::span<const double> gamma_exp, std::span<const double> xi_exp,
                             double eta) {
  double lo = std::numeric_limits<double>::infinity();
  for (double g : gamma_exp) lo = std::min(lo, eta * g);
  for (double x : xi_exp) lo = std::min(lo, eta * x);
  WeightVector out;
  out.phi.resize(gamma_exp.size());
  out.psi.resize(xi_exp.size());
  double z = 0.0;
  for (std::size_t i = 0; i < gamma_exp.size(); ++i) z += out.phi[i] = std::exp(-(eta * gamma_exp[i] - lo));
  for (std::size_t i = 0; i < xi_exp.size(); ++i) z += out.psi[i] = std::exp(-(eta * xi_exp[i] - lo));
  for (double& x : out.phi) x /= z;
  for (double& x : out.psi) x /= z;
  return out;
}

std::vector<WeightVector> virtual_mwu(const VirtualMwuInput& in, const MeanView& means,
                                      const KappaOracle& oracle,
                                      std::vector<MwuTraceRow>* trace) {
  if (in.types.empty()) throw Error(ErrorCode::kEmptySampleWindow, "virtual MWU needs arrivals");
  const std::size_t nr = means.num_rewards(), nc = means.num_resources();
  if (in.capacities.size() != nc)
    throw Error(ErrorCode::kDimensionMismatch, "capacities length differs from resource count");
  const std::size_t n = nr + nc;
  const double target = in.lambda_hat - in.eps_c;
  std::vector<double> slack_volume(nc);
  for (std::size_t i = 0; i < nc; ++i) slack_volume[i] = std::min(in.capacities[i], in.v_max);

  std::vector<double> G(nr, 0.0), X(nc, 0.0), w(nr), v(nc);
  WeightVector current = WeightVector::uniform(nr, nc);
  std::vector<WeightVector> theta;
  theta.reserve(in.types.size());
  if (trace) trace->clear();
  for (std::size_t s = 1; s <= in.types.size(); ++s) {
    const TypeIndex j = in.types[s - 1];
    const ActionIndex k = oracle.best_action(current, j);
    if (trace) trace->push_back(MwuTraceRow{s, G, X, current, k});
    theta.push_back(current);
    means.means(j, k, w, v);
    for (std::size_t i = 0; i < nr; ++i) G[i] += w[i] - target;
    for (std::size_t i = 0; i < nc; ++i) X[i] += -v[i] + slack_volume[i];
    current = softmax_weights(G, X, learning_rate(s + 1, in.gamma, n));
  }
  return theta;
}

double RegretReport::slack() const {
  const double lo = *std::min_element(average_loss.begin(), average_loss.end());
  return lo - (weighted_average - bound);
}

RegretReport mwu_regret_harness(const std::vector<std::vector<double>>& losses, double bound) {
  if (losses.empty()) throw Error(ErrorCode::kInvalidArgument, "empty loss sequence");
  const std::size_t n = losses.front().size();
  const std::size_t tau = losses.size();
  std::vector<double> cum(n, 0.0);
  RegretReport r;
  r.average_loss.assign(n, 0.0);
  double weighted = 0.0;
  const std::span<const double> none;
  for (std::size_t s = 1; s <= tau; ++s) {
    const auto& l = losses[s - 1];
    if (l.size() != n) throw Error(ErrorCode::kDimensionMismatch, "loss vectors differ in length");
    const double eta = n > 1 ? learning_rate(s, bound, n) : 0.0;
    const WeightVector th = softmax_weights(cum, none, eta);
    for (std::size_t i = 0; i < n; ++i) {
      weighted += th.phi[i] * l[i];
      cum[i] += l[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) r.average_loss[i] = cum[i] / static_cast<double>(tau);
  r.weighted_average = weighted / static_cast<double>(tau);
  r.bound = 2.0 * bound * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(tau));
  return r;
}

}  // namespace rra
