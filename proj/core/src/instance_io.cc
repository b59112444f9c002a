#include "rra/instance_io.h"

#include <fmt/format.h>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include "json.hpp"

namespace rra {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

void only_fields(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) schema_error(fmt::format("{} must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) schema_error(fmt::format("unknown field '{}' in {}", key, where));
  }
}

const json& field(const json& obj, const char* name, std::string_view where) {
  auto it = obj.find(name);
  if (it == obj.end()) schema_error(fmt::format("missing field '{}' in {}", name, where));
  return *it;
}

template <class T>
T get(const json& obj, const char* name, std::string_view where) {
  try {
    return field(obj, name, where).get<T>();
  } catch (const json::exception& e) {
    schema_error(fmt::format("field '{}' in {}: {}", name, where, e.what()));
  }
}

LoadedInstance parse_tabular(const json& doc) {
  only_fields(doc, "instance", {"kind", "n_rewards", "n_resources", "n_types", "n_actions", "capacities",
                                "arrival_probs", "null_type", "null_action", "bounds", "outcomes",
                                "horizon_hint"});
  const auto nr = get<std::size_t>(doc, "n_rewards", "instance");
  const auto nc = get<std::size_t>(doc, "n_resources", "instance");
  const auto J = get<std::size_t>(doc, "n_types", "instance");
  const auto K = get<std::size_t>(doc, "n_actions", "instance");
  auto model = std::make_shared<TabularOutcomeModel>(nr, nc, J, K);
  for (const auto& cell : get<json>(doc, "outcomes", "instance")) {
    only_fields(cell, "outcome cell", {"type", "action", "support"});
    const auto j = get<TypeIndex>(cell, "type", "outcome cell");
    const auto k = get<ActionIndex>(cell, "action", "outcome cell");
    std::vector<SupportPoint> support;
    for (const auto& row : get<json>(cell, "support", "outcome cell")) {
      only_fields(row, "support point", {"p", "W", "A", "D"});
      SupportPoint pt;
      pt.probability = get<double>(row, "p", "support point");
      pt.rewards = get<std::vector<double>>(row, "W", "support point");
      pt.allocations = get<std::vector<double>>(row, "A", "support point");
      pt.durations = get<std::vector<int>>(row, "D", "support point");
      support.push_back(std::move(pt));
    }
    if (j >= J || k >= K) throw Error(ErrorCode::kIndexOutOfRange, fmt::format("outcome cell ({}, {})", j, k));
    model->set_distribution(j, k, std::move(support));
  }
  if (auto it = doc.find("bounds"); it != doc.end()) {
    only_fields(*it, "bounds", {"w_max", "a_max", "d_max"});
    auto opt = [&](const char* name) -> std::optional<double> {
      if (!it->contains(name)) return std::nullopt;
      return get<double>(*it, name, "bounds");
    };
    std::optional<int> d;
    if (it->contains("d_max")) d = get<int>(*it, "d_max", "bounds");
    model->declare_bounds(opt("w_max"), opt("a_max"), d);
  }
  InstanceSpec spec;
  spec.capacities = get<std::vector<double>>(doc, "capacities", "instance");
  spec.arrival_probs = get<std::vector<double>>(doc, "arrival_probs", "instance");
  if (doc.contains("null_type")) spec.null_type = get<TypeIndex>(doc, "null_type", "instance");
  if (doc.contains("null_action")) spec.null_action = get<ActionIndex>(doc, "null_action", "instance");
  if (doc.contains("horizon_hint")) spec.horizon_hint = get<TimeStep>(doc, "horizon_hint", "instance");
  spec.outcomes = std::move(model);
  return LoadedInstance{build_instance(std::move(spec)), nullptr};
}

LoadedInstance parse_mnl(const json& doc) {
  only_fields(doc, "instance", {"kind", "prices", "product_features", "customer_features", "utilities",
                                "durations", "kpi", "customer_probs", "capacities", "horizon_hint"});
  auto prices = get<std::vector<double>>(doc, "prices", "instance");
  std::vector<std::vector<DurationDistribution>> durations;
  for (const auto& row : get<json>(doc, "durations", "instance")) {
    auto& out = durations.emplace_back();
    for (const auto& d : row) {
      only_fields(d, "duration distribution", {"values", "probs"});
      out.push_back(DurationDistribution{get<std::vector<int>>(d, "values", "duration distribution"),
                                         get<std::vector<double>>(d, "probs", "duration distribution")});
    }
  }
  std::shared_ptr<const MnlModel> mnl;
  const bool has_features = doc.contains("product_features") || doc.contains("customer_features");
  if (has_features == doc.contains("utilities"))
    schema_error("give either product/customer features or utilities, not both");
  if (has_features) {
    mnl = std::make_shared<MnlModel>(
        get<std::vector<std::vector<double>>>(doc, "product_features", "instance"),
        get<std::vector<std::vector<std::vector<double>>>>(doc, "customer_features", "instance"),
        std::move(prices), std::move(durations));
  } else {
    mnl = std::make_shared<MnlModel>(MnlModel::from_utilities(
        get<std::vector<std::vector<double>>>(doc, "utilities", "instance"), std::move(prices),
        std::move(durations)));
  }
  const json& kj = get<json>(doc, "kpi", "instance");
  only_fields(kj, "kpi", {"sigma", "category", "max_assortment"});
  KpiConfig kpi;
  kpi.sigma = get<std::vector<double>>(kj, "sigma", "kpi");
  kpi.category = get<std::vector<int>>(kj, "category", "kpi");
  kpi.max_assortment = get<std::size_t>(kj, "max_assortment", "kpi");
  auto outcomes = std::make_shared<const MnlOutcomeModel>(mnl, kpi);
  Instance instance = build_mnl_instance(outcomes, get<std::vector<double>>(doc, "customer_probs", "instance"),
                                         get<std::vector<double>>(doc, "capacities", "instance"));
  return LoadedInstance{std::move(instance), std::move(outcomes)};
}

json tabular_json(const Instance& instance, const TabularOutcomeModel& model) {
  json doc;
  doc["kind"] = "tabular";
  doc["n_rewards"] = instance.num_rewards();
  doc["n_resources"] = instance.num_resources();
  doc["n_types"] = instance.num_types();
  doc["n_actions"] = instance.num_actions();
  doc["capacities"] = instance.capacities();
  doc["arrival_probs"] = instance.arrival_probs();
  doc["null_type"] = instance.null_type();
  doc["null_action"] = instance.null_action();
  const SupportBounds b = model.support_bounds();
  doc["bounds"] = {{"w_max", b.w_max}, {"a_max", b.a_max}, {"d_max", b.d_max}};
  json cells = json::array();
  for (TypeIndex j = 0; j < instance.num_types(); ++j)
    for (ActionIndex k = 0; k < instance.num_actions(); ++k) {
      const auto& support = model.support(j, k);
      if (support.empty()) continue;
      json rows = json::array();
      for (const auto& pt : support)
        rows.push_back({{"p", pt.probability}, {"W", pt.rewards}, {"A", pt.allocations}, {"D", pt.durations}});
      cells.push_back({{"type", j}, {"action", k}, {"support", std::move(rows)}});
    }
  doc["outcomes"] = std::move(cells);
  if (instance.horizon_hint()) doc["horizon_hint"] = *instance.horizon_hint();
  return doc;
}

json mnl_json(const Instance& instance, const MnlOutcomeModel& outcomes) {
  const MnlModel& mnl = outcomes.mnl();
  json doc;
  doc["kind"] = "mnl";
  doc["prices"] = mnl.prices();
  if (!mnl.product_features().empty()) {
    doc["product_features"] = mnl.product_features();
    doc["customer_features"] = mnl.customer_features();
  } else {
    json u = json::array();
    for (std::size_t j = 0; j < mnl.num_customers(); ++j) {
      const auto row = mnl.utilities(j);
      u.push_back(std::vector<double>(row.begin(), row.end()));
    }
    doc["utilities"] = std::move(u);
  }
  json durations = json::array();
  for (std::size_t j = 0; j < mnl.num_customers(); ++j) {
    json row = json::array();
    for (std::size_t i = 0; i < mnl.num_products(); ++i)
      row.push_back({{"values", mnl.duration(j, i).values}, {"probs", mnl.duration(j, i).probs}});
    durations.push_back(std::move(row));
  }
  doc["durations"] = std::move(durations);
  const KpiConfig& kpi = outcomes.kpi();
  doc["kpi"] = {{"sigma", kpi.sigma}, {"category", kpi.category}, {"max_assortment", kpi.max_assortment}};
  const auto& p = instance.arrival_probs();
  doc["customer_probs"] = std::vector<double>(p.begin() + 1, p.end());
  doc["capacities"] = instance.capacities();
  return doc;
}

}  // namespace

LoadedInstance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kIoError, fmt::format("instance file is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) schema_error("instance file must hold a JSON object");
  const auto kind = get<std::string>(doc, "kind", "instance");
  if (kind == "tabular") return parse_tabular(doc);
  if (kind == "mnl") return parse_mnl(doc);
  schema_error(fmt::format("unknown instance kind '{}'", kind));
}

LoadedInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string serialize_instance(const Instance& instance) {
  const OutcomeModel& om = instance.outcomes();
  if (const auto* tab = dynamic_cast<const TabularOutcomeModel*>(&om))
    return tabular_json(instance, *tab).dump(1) + "\n";
  if (const auto* mnl = dynamic_cast<const MnlOutcomeModel*>(&om)) return mnl_json(instance, *mnl).dump(1) + "\n";
  throw Error(ErrorCode::kInvalidArgument, "only tabular and MNL instances can be serialized");
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  const std::string text = serialize_instance(instance);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("write to {} failed", path.string()));
}

}  // namespace rra
