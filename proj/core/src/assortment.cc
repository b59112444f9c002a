#include "rra/assortment.h"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "rra/lp.h"

namespace rra {

// ---------------------------------------------------------------------------
// Catalog

AssortmentCatalog::AssortmentCatalog(std::size_t n_products, std::size_t max_size)
    : n_products_(n_products), max_size_(std::min(max_size, n_products)) {
  if (n_products > 63) throw Error(ErrorCode::kTooLarge, "at most 63 products are supported");
  masks_.push_back(0);
  std::vector<std::size_t> pick;
  for (std::size_t size = 1; size <= max_size_; ++size) {
    pick.resize(size);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
      std::uint64_t m = 0;
      for (std::size_t i : pick) m |= std::uint64_t{1} << i;
      masks_.push_back(m);
      if (masks_.size() > 50'000'000) throw Error(ErrorCode::kTooLarge, "assortment catalog too large");
      // Next combination in lexicographic order.
      std::size_t pos = size;
      while (pos > 0 && pick[pos - 1] == n_products - size + pos - 1) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t r = pos; r < size; ++r) pick[r] = pick[r - 1] + 1;
    }
  }
  sorted_.reserve(masks_.size());
  for (ActionIndex k = 0; k < masks_.size(); ++k) sorted_.emplace_back(masks_[k], k);
  std::sort(sorted_.begin(), sorted_.end());
}

std::vector<std::size_t> AssortmentCatalog::items(ActionIndex k) const {
  std::uint64_t m = mask(k);
  std::vector<std::size_t> out;
  while (m) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

std::optional<ActionIndex> AssortmentCatalog::index_of(std::span<const std::size_t> items) const {
  std::uint64_t m = 0;
  for (std::size_t i : items) {
    if (i >= n_products_) return std::nullopt;
    m |= std::uint64_t{1} << i;
  }
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::make_pair(m, ActionIndex{0}));
  if (it == sorted_.end() || it->first != m) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// KPI configuration and durations

void KpiConfig::validate(std::size_t n_products) const {
  if (sigma.size() != 3) throw Error(ErrorCode::kDimensionMismatch, "sigma needs three entries");
  for (double s : sigma)
    if (!(s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma entries must be positive");
  if (category.size() != n_products)
    throw Error(ErrorCode::kDimensionMismatch, "one category per product is required");
  for (int c : category)
    if (c != 1 && c != 2) throw Error(ErrorCode::kInvalidArgument, "categories must be 1 or 2");
  if (max_assortment < 1) throw Error(ErrorCode::kInvalidArgument, "max_assortment must be >= 1");
}

double DurationDistribution::mean() const {
  double m = 0.0;
  for (std::size_t s = 0; s < values.size(); ++s) m += values[s] * probs[s];
  return m;
}

double DurationDistribution::tail(int s) const {
  double p = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a)
    if (values[a] >= s) p += probs[a];
  return p;
}

int DurationDistribution::max_value() const {
  return values.empty() ? 0 : *std::max_element(values.begin(), values.end());
}

namespace {

void validate_duration(const DurationDistribution& d) {
  if (d.values.empty() || d.values.size() != d.probs.size())
    throw Error(ErrorCode::kMalformedProbabilities, "duration support and probabilities differ");
  double total = 0.0;
  for (std::size_t a = 0; a < d.values.size(); ++a) {
    if (d.values[a] < 1) throw Error(ErrorCode::kInvalidArgument, "durations must be >= 1");
    if (!(d.probs[a] >= 0.0)) throw Error(ErrorCode::kMalformedProbabilities, "negative probability");
    total += d.probs[a];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorCode::kMalformedProbabilities, fmt::format("duration probabilities sum to {}", total));
}

int sample_duration(Rng& rng, const DurationDistribution& d) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a < d.values.size(); ++a) {
    acc += d.probs[a];
    if (u < acc) return d.values[a];
  }
  return d.values.back();
}

}  // namespace

// ---------------------------------------------------------------------------
// MNL model

MnlModel::MnlModel(std::vector<std::vector<double>> product_features,
                   std::vector<std::vector<std::vector<double>>> customer_features,
                   std::vector<double> prices,
                   std::vector<std::vector<DurationDistribution>> durations)
    : product_features_(std::move(product_features)),
      customer_features_(std::move(customer_features)),
      prices_(std::move(prices)),
      durations_(std::move(durations)) {
  const std::size_t m = prices_.size();
  if (product_features_.size() != m)
    throw Error(ErrorCode::kDimensionMismatch, "one feature vector per product is required");
  utilities_.resize(customer_features_.size());
  for (std::size_t j = 0; j < customer_features_.size(); ++j) {
    if (customer_features_[j].size() != m)
      throw Error(ErrorCode::kDimensionMismatch, "customer features need one vector per product");
    utilities_[j].resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& b = customer_features_[j][i];
      const auto& f = product_features_[i];
      if (b.size() != f.size()) throw Error(ErrorCode::kDimensionMismatch, "feature dimensions differ");
      utilities_[j][i] = std::exp(std::inner_product(b.begin(), b.end(), f.begin(), 0.0));
    }
  }
  finish();
}

MnlModel MnlModel::from_utilities(std::vector<std::vector<double>> utilities,
                                  std::vector<double> prices,
                                  std::vector<std::vector<DurationDistribution>> durations) {
  MnlModel m;
  m.utilities_ = std::move(utilities);
  m.prices_ = std::move(prices);
  m.durations_ = std::move(durations);
  for (const auto& row : m.utilities_) {
    if (row.size() != m.prices_.size())
      throw Error(ErrorCode::kDimensionMismatch, "one utility per product is required");
    for (double u : row)
      if (!(u > 0.0) || !std::isfinite(u))
        throw Error(ErrorCode::kInvalidArgument, "utilities must be positive and finite");
  }
  m.finish();
  return m;
}

void MnlModel::finish() {
  const std::size_t m = prices_.size();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "at least one product is required");
  for (double r : prices_)
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorCode::kInvalidArgument, "prices must be >= 0");
  if (durations_.size() != utilities_.size())
    throw Error(ErrorCode::kDimensionMismatch, "one duration row per customer is required");
  mean_durations_.resize(durations_.size());
  for (std::size_t j = 0; j < durations_.size(); ++j) {
    if (durations_[j].size() != m)
      throw Error(ErrorCode::kDimensionMismatch, "one duration distribution per product is required");
    mean_durations_[j].resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      validate_duration(durations_[j][i]);
      mean_durations_[j][i] = durations_[j][i].mean();
    }
  }
}

double mnl_choice_prob(const MnlModel& model, std::size_t customer,
                       std::span<const std::size_t> assortment, std::size_t product) {
  if (customer >= model.num_customers()) throw Error(ErrorCode::kIndexOutOfRange, "customer index");
  double denom = 1.0;
  bool offered = false;
  for (std::size_t i : assortment) {
    if (i >= model.num_products()) throw Error(ErrorCode::kIndexOutOfRange, "product index");
    denom += model.utility(customer, i);
    offered = offered || i == product;
  }
  if (product == kNoPurchase) return 1.0 / denom;
  if (!offered)
    throw Error(ErrorCode::kItemNotOffered, fmt::format("product {} is not in the assortment", product));
  return model.utility(customer, product) / denom;
}

std::size_t sample_choice(Rng& rng, const MnlModel& model, std::size_t customer,
                          std::span<const std::size_t> assortment) {
  double denom = 1.0;
  for (std::size_t i : assortment) denom += model.utility(customer, i);
  const double u = std::uniform_real_distribution<double>(0.0, denom)(rng);
  double acc = 1.0;  // no-purchase mass comes first
  if (u < acc) return kNoPurchase;
  for (std::size_t i : assortment) {
    acc += model.utility(customer, i);
    if (u < acc) return i;
  }
  return assortment.empty() ? kNoPurchase : assortment.back();
}

std::vector<double> kpi_rewards(std::span<const double> allocations, std::span<const double> prices,
                                const KpiConfig& kpi) {
  if (allocations.size() != prices.size() || kpi.category.size() != prices.size())
    throw Error(ErrorCode::kDimensionMismatch, "allocations, prices and categories differ in length");
  std::vector<double> w(3, 0.0);
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (allocations[i] == 0.0) continue;
    w[0] += prices[i] * allocations[i] / kpi.sigma[0];
    if (kpi.category[i] == 1)
      w[1] += allocations[i] / kpi.sigma[1];
    else
      w[2] += allocations[i] / kpi.sigma[2];
  }
  return w;
}

std::vector<double> assortment_coefficients(const MnlModel& model, const KpiConfig& kpi,
                                            std::size_t customer, const WeightVector& weights) {
  const std::size_t m = model.num_products();
  if (weights.phi.size() != 3 || weights.psi.size() != m)
    throw Error(ErrorCode::kDimensionMismatch, "weight vector does not match the KPI model");
  std::vector<double> rho(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double category_term = kpi.category[i] == 1 ? weights.phi[1] / kpi.sigma[1]
                                                      : weights.phi[2] / kpi.sigma[2];
    rho[i] = model.prices()[i] * weights.phi[0] / kpi.sigma[0] + category_term -
             model.mean_duration(customer, i) * weights.psi[i];
  }
  return rho;
}

double assortment_value(std::span<const double> utilities, std::span<const double> rho,
                        std::span<const std::size_t> items) {
  double denom = 1.0, num = 0.0;
  for (std::size_t i : items) {
    denom += utilities[i];
    num += rho[i] * utilities[i];
  }
  return num / denom;
}

AssortmentChoice assortment_oracle(std::span<const double> utilities, std::span<const double> rho,
                                   std::size_t max_size) {
  if (utilities.size() != rho.size())
    throw Error(ErrorCode::kDimensionMismatch, "utilities and coefficients differ in length");
  if (max_size < 1) throw Error(ErrorCode::kInvalidArgument, "max_size must be >= 1");

  // A product with rho_i <= 0 can only dilute the others, so it never
  // belongs to an optimal assortment; leaving it out keeps the LP small.
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] > 0.0) cand.push_back(i);
  AssortmentChoice best;
  if (cand.empty()) return best;

  LinearProgram lp(ObjectiveSense::kMaximize);
  const std::size_t z0 = lp.add_variable(0.0, true, "z0");
  std::vector<std::size_t> z(cand.size());
  for (std::size_t a = 0; a < cand.size(); ++a) z[a] = lp.add_variable(rho[cand[a]], true);
  const std::size_t mass = lp.add_row(RowSense::kEqual, 1.0, "mass");
  lp.add_coefficient(mass, z0, 1.0);
  const std::size_t card = lp.add_row(RowSense::kLessEqual, 0.0, "cardinality");
  lp.add_coefficient(card, z0, -static_cast<double>(max_size));
  for (std::size_t a = 0; a < cand.size(); ++a) {
    const double u = utilities[cand[a]];
    if (!(u > 0.0)) throw Error(ErrorCode::kInvalidArgument, "utilities must be positive");
    lp.add_coefficient(mass, z[a], 1.0);
    lp.add_coefficient(card, z[a], 1.0 / u);
    // z_i / u_i <= z0, written as z_i - u_i z0 <= 0.
    const std::size_t r = lp.add_row(RowSense::kLessEqual, 0.0);
    lp.add_coefficient(r, z[a], 1.0);
    lp.add_coefficient(r, z0, -u);
  }
  const LpSolution sol = solve_lp(lp);
  if (!sol.optimal())
    throw Error(ErrorCode::kNumericalFailure,
                fmt::format("assortment program ended {}", to_string(sol.status)));

  const double zero = sol.primal[z0];
  for (std::size_t a = 0; a < cand.size(); ++a) {
    const double zi = sol.primal[z[a]];
    if (zi <= 1e-9) continue;
    const double full = utilities[cand[a]] * zero;
    if (std::abs(zi - full) > 1e-6 * std::max(1.0, full))
      throw Error(ErrorCode::kNumericalFailure,
                  fmt::format("assortment vertex is fractional at product {} ({} vs {})", cand[a], zi,
                              full));
    best.items.push_back(cand[a]);
  }
  if (best.items.size() > max_size)
    throw Error(ErrorCode::kNumericalFailure, "assortment vertex exceeds the cardinality limit");
  best.objective = assortment_value(utilities, rho, best.items);
  return best;
}

// ---------------------------------------------------------------------------
// Outcome model

MnlOutcomeModel::MnlOutcomeModel(std::shared_ptr<const MnlModel> model, KpiConfig kpi)
    : model_(std::move(model)),
      kpi_(std::move(kpi)),
      catalog_(model_ ? model_->num_products() : 0, kpi_.max_assortment) {
  if (!model_) throw Error(ErrorCode::kInvalidArgument, "missing MNL model");
  kpi_.validate(model_->num_products());
}

void MnlOutcomeModel::mean_outcome(TypeIndex j, ActionIndex k, std::span<double> reward,
                                   std::span<double> volume) const {
  std::fill(reward.begin(), reward.end(), 0.0);
  std::fill(volume.begin(), volume.end(), 0.0);
  if (j >= num_types() || k >= num_actions()) throw Error(ErrorCode::kIndexOutOfRange, "(j, k) pair");
  if (j == kNullType || k == kNullAction) return;
  const std::size_t c = j - 1;
  const auto items = catalog_.items(k);
  double denom = 1.0;
  for (std::size_t i : items) denom += model_->utility(c, i);
  for (std::size_t i : items) {
    const double q = model_->utility(c, i) / denom;
    reward[0] += model_->prices()[i] * q / kpi_.sigma[0];
    if (kpi_.category[i] == 1)
      reward[1] += q / kpi_.sigma[1];
    else
      reward[2] += q / kpi_.sigma[2];
    volume[i] = q * model_->mean_duration(c, i);
  }
}

void MnlOutcomeModel::mean_allocation(TypeIndex j, ActionIndex k, std::span<double> alloc,
                                      std::span<double> duration) const {
  std::fill(alloc.begin(), alloc.end(), 0.0);
  std::fill(duration.begin(), duration.end(), 0.0);
  if (j >= num_types() || k >= num_actions()) throw Error(ErrorCode::kIndexOutOfRange, "(j, k) pair");
  if (j == kNullType || k == kNullAction) return;
  const std::size_t c = j - 1;
  const auto items = catalog_.items(k);
  double denom = 1.0;
  for (std::size_t i : items) denom += model_->utility(c, i);
  for (std::size_t i : items) {
    const double q = model_->utility(c, i) / denom;
    alloc[i] = q;
    duration[i] = q * model_->mean_duration(c, i);  // D is zero unless the product sells
  }
}

void MnlOutcomeModel::mean_tail(TypeIndex j, ActionIndex k, int horizon, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (j >= num_types() || k >= num_actions()) throw Error(ErrorCode::kIndexOutOfRange, "(j, k) pair");
  if (j == kNullType || k == kNullAction) return;
  const std::size_t c = j - 1;
  const auto items = catalog_.items(k);
  double denom = 1.0;
  for (std::size_t i : items) denom += model_->utility(c, i);
  const auto h = static_cast<std::size_t>(horizon);
  for (std::size_t i : items) {
    const double q = model_->utility(c, i) / denom;
    const auto& d = model_->duration(c, i);
    for (int s = 1; s <= horizon; ++s) out[i * h + static_cast<std::size_t>(s - 1)] = q * d.tail(s);
  }
}

void MnlOutcomeModel::sample(Rng& rng, TypeIndex j, ActionIndex k, Outcome& out) const {
  out.rewards.assign(3, 0.0);
  out.allocations.assign(num_resources(), 0.0);
  out.durations.assign(num_resources(), 0);
  if (j >= num_types() || k >= num_actions()) throw Error(ErrorCode::kIndexOutOfRange, "(j, k) pair");
  if (j == kNullType || k == kNullAction) return;
  const std::size_t c = j - 1;
  const auto items = catalog_.items(k);
  const std::size_t chosen = sample_choice(rng, *model_, c, items);
  if (chosen == kNoPurchase) return;
  out.allocations[chosen] = 1.0;
  out.durations[chosen] = sample_duration(rng, model_->duration(c, chosen));
  out.rewards = kpi_rewards(out.allocations, model_->prices(), kpi_);
}

SupportBounds MnlOutcomeModel::support_bounds() const {
  SupportBounds b;
  b.a_max = 1.0;
  for (std::size_t i = 0; i < model_->num_products(); ++i) {
    b.w_max = std::max(b.w_max, model_->prices()[i] / kpi_.sigma[0]);
    b.w_max = std::max(b.w_max, 1.0 / kpi_.sigma[kpi_.category[i] == 1 ? 1 : 2]);
  }
  for (std::size_t c = 0; c < model_->num_customers(); ++c)
    for (std::size_t i = 0; i < model_->num_products(); ++i)
      b.d_max = std::max(b.d_max, model_->duration(c, i).max_value());
  return b;
}

double MnlOutcomeModel::max_mean_volume() const {
  // q_ijk is largest when k = {i}, so singletons attain the maximum.
  double best = 0.0;
  for (std::size_t c = 0; c < model_->num_customers(); ++c)
    for (std::size_t i = 0; i < model_->num_products(); ++i) {
      const double u = model_->utility(c, i);
      best = std::max(best, model_->mean_duration(c, i) * u / (1.0 + u));
    }
  return best;
}

// ---------------------------------------------------------------------------
// Oracle and instance

MnlAssortmentKappa::MnlAssortmentKappa(std::shared_ptr<const MnlOutcomeModel> outcomes)
    : outcomes_(std::move(outcomes)) {
  if (!outcomes_) throw Error(ErrorCode::kInvalidArgument, "missing outcome model");
}

ActionIndex MnlAssortmentKappa::best_action(const WeightVector& weights, TypeIndex j) const {
  if (j >= outcomes_->num_types()) throw Error(ErrorCode::kIndexOutOfRange, "type index");
  if (j == MnlOutcomeModel::kNullType) return MnlOutcomeModel::kNullAction;
  const MnlModel& mnl = outcomes_->mnl();
  const auto rho = assortment_coefficients(mnl, outcomes_->kpi(), j - 1, weights);
  const AssortmentChoice choice = assortment_oracle(mnl.utilities(j - 1), rho,
                                                    outcomes_->catalog().max_size());
  const auto k = outcomes_->catalog().index_of(choice.items);
  if (!k) throw Error(ErrorCode::kOracleFailure, "assortment is not in the catalog");
  return *k;
}

Instance build_mnl_instance(std::shared_ptr<const MnlOutcomeModel> outcomes,
                            std::vector<double> customer_probs, std::vector<double> capacities) {
  if (!outcomes) throw Error(ErrorCode::kInvalidArgument, "missing outcome model");
  if (customer_probs.size() != outcomes->mnl().num_customers())
    throw Error(ErrorCode::kDimensionMismatch, "one probability per customer is required");
  InstanceSpec spec;
  spec.capacities = std::move(capacities);
  spec.arrival_probs.reserve(customer_probs.size() + 1);
  spec.arrival_probs.push_back(0.0);
  spec.arrival_probs.insert(spec.arrival_probs.end(), customer_probs.begin(), customer_probs.end());
  spec.null_type = MnlOutcomeModel::kNullType;
  spec.null_action = MnlOutcomeModel::kNullAction;
  spec.outcomes = std::move(outcomes);
  return build_instance(std::move(spec));
}

}  // namespace rra
