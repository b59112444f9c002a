#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rra/model.h"
#include "rra/mwu.h"

namespace rra {

/// Marker for the no-purchase option.
inline constexpr std::size_t kNoPurchase = static_cast<std::size_t>(-1);

/// All subsets of {0..n_products-1} with at most `max_size` elements, indexed
/// by size and then lexicographically. Index 0 is the empty assortment.
class AssortmentCatalog {
 public:
  AssortmentCatalog(std::size_t n_products, std::size_t max_size);

  std::size_t size() const { return masks_.size(); }
  std::size_t num_products() const { return n_products_; }
  std::size_t max_size() const { return max_size_; }
  std::uint64_t mask(ActionIndex k) const { return masks_.at(k); }
  std::vector<std::size_t> items(ActionIndex k) const;
  /// Index of the assortment with these items; nullopt if not in the catalog.
  std::optional<ActionIndex> index_of(std::span<const std::size_t> items) const;

 private:
  std::size_t n_products_;
  std::size_t max_size_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::pair<std::uint64_t, ActionIndex>> sorted_;  // for lookup
};

/// Normalization and category structure of the three KPI objectives:
/// revenue, category-1 sales and category-2 sales.
struct KpiConfig {
  std::vector<double> sigma{1.0, 1.0, 1.0};
  std::vector<int> category;  // per product, 1 or 2
  std::size_t max_assortment = 5;

  void validate(std::size_t n_products) const;
};

/// Finite-support distribution of a usage duration.
struct DurationDistribution {
  std::vector<int> values;
  std::vector<double> probs;

  double mean() const;
  /// P(Duration >= s).
  double tail(int s) const;
  int max_value() const;
};

/// MNL choice data: product features f_i, customer features b_ij, cached
/// utilities u_ij = exp(b_ij . f_i), prices, and duration distributions.
class MnlModel {
 public:
  /// Builds from features. `customer_features[j][i]` is b_ij.
  MnlModel(std::vector<std::vector<double>> product_features,
           std::vector<std::vector<std::vector<double>>> customer_features,
           std::vector<double> prices, std::vector<std::vector<DurationDistribution>> durations);

  /// Builds directly from utilities (u[j][i]), without features.
  static MnlModel from_utilities(std::vector<std::vector<double>> utilities,
                                 std::vector<double> prices,
                                 std::vector<std::vector<DurationDistribution>> durations);

  std::size_t num_products() const { return prices_.size(); }
  std::size_t num_customers() const { return utilities_.size(); }
  double utility(std::size_t customer, std::size_t product) const { return utilities_[customer][product]; }
  std::span<const double> utilities(std::size_t customer) const { return utilities_[customer]; }
  const std::vector<double>& prices() const { return prices_; }
  const DurationDistribution& duration(std::size_t customer, std::size_t product) const {
    return durations_[customer][product];
  }
  double mean_duration(std::size_t customer, std::size_t product) const {
    return mean_durations_[customer][product];
  }
  const std::vector<std::vector<double>>& product_features() const { return product_features_; }
  const std::vector<std::vector<std::vector<double>>>& customer_features() const {
    return customer_features_;
  }

 private:
  MnlModel() = default;
  void finish();

  std::vector<std::vector<double>> product_features_;
  std::vector<std::vector<std::vector<double>>> customer_features_;
  std::vector<std::vector<double>> utilities_;
  std::vector<double> prices_;
  std::vector<std::vector<DurationDistribution>> durations_;
  std::vector<std::vector<double>> mean_durations_;
};

/// q_{ijk}; `product` may be kNoPurchase. Throws kItemNotOffered when a
/// product outside the assortment is queried.
double mnl_choice_prob(const MnlModel& model, std::size_t customer,
                       std::span<const std::size_t> assortment, std::size_t product);

/// Draws the chosen product (or kNoPurchase).
std::size_t sample_choice(Rng& rng, const MnlModel& model, std::size_t customer,
                          std::span<const std::size_t> assortment);

/// Rewards (revenue, category-1 sales, category-2 sales) for allocations A.
std::vector<double> kpi_rewards(std::span<const double> allocations, std::span<const double> prices,
                                const KpiConfig& kpi);

/// Linear coefficient of product i in the oracle objective:
/// r_i phi_1 / sigma_1 + phi'_i / sigma'_i - dbar_ij psi_i.
std::vector<double> assortment_coefficients(const MnlModel& model, const KpiConfig& kpi,
                                            std::size_t customer, const WeightVector& weights);

struct AssortmentChoice {
  std::vector<std::size_t> items;  // ascending
  double objective = 0.0;          // sum_i rho_i q_i
};

/// MNL expected objective of an assortment: sum_{i in k} rho_i q_i.
double assortment_value(std::span<const double> utilities, std::span<const double> rho,
                        std::span<const std::size_t> items);

/// Solves the cardinality-constrained assortment LP in (z_0, z_i) and
/// recovers {i : z_i > 1e-9}. Throws kNumericalFailure when the optimal
/// vertex is not integral to 1e-6.
AssortmentChoice assortment_oracle(std::span<const double> utilities, std::span<const double> rho,
                                   std::size_t max_size);

/// Outcome model of the assortment application. Type 0 is the null type and
/// type j >= 1 is MNL customer j - 1; action k is the catalog's k-th
/// assortment, with the empty assortment (index 0) as the null action.
class MnlOutcomeModel final : public OutcomeModel {
 public:
  MnlOutcomeModel(std::shared_ptr<const MnlModel> model, KpiConfig kpi);

  const MnlModel& mnl() const { return *model_; }
  const KpiConfig& kpi() const { return kpi_; }
  const AssortmentCatalog& catalog() const { return catalog_; }
  static constexpr TypeIndex kNullType = 0;
  static constexpr ActionIndex kNullAction = 0;

  std::size_t num_rewards() const override { return 3; }
  std::size_t num_resources() const override { return model_->num_products(); }
  std::size_t num_types() const override { return model_->num_customers() + 1; }
  std::size_t num_actions() const override { return catalog_.size(); }

  void mean_outcome(TypeIndex j, ActionIndex k, std::span<double> reward,
                    std::span<double> volume) const override;
  void mean_allocation(TypeIndex j, ActionIndex k, std::span<double> alloc,
                       std::span<double> duration) const override;
  void mean_tail(TypeIndex j, ActionIndex k, int horizon, std::span<double> out) const override;
  void sample(Rng& rng, TypeIndex j, ActionIndex k, Outcome& out) const override;
  SupportBounds support_bounds() const override;
  double max_mean_volume() const override;

 private:
  std::shared_ptr<const MnlModel> model_;
  KpiConfig kpi_;
  AssortmentCatalog catalog_;
};

/// Oracle that answers kappa through the assortment LP.
class MnlAssortmentKappa final : public KappaOracle {
 public:
  explicit MnlAssortmentKappa(std::shared_ptr<const MnlOutcomeModel> outcomes);
  ActionIndex best_action(const WeightVector& weights, TypeIndex j) const override;

 private:
  std::shared_ptr<const MnlOutcomeModel> outcomes_;
};

/// Instance over an MNL outcome model; type 0 (null) gets probability zero
/// and customers share `customer_probs`.
Instance build_mnl_instance(std::shared_ptr<const MnlOutcomeModel> outcomes,
                            std::vector<double> customer_probs, std::vector<double> capacities);

}  // namespace rra
