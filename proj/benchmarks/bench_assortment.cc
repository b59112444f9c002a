#include <benchmark/benchmark.h>

#include <random>

#include "rra/assortment.h"
#include "rra/experiment.h"
#include "rra/oracle.h"

namespace {

struct Coefficients {
  std::vector<double> u, rho;
};

Coefficients random_coefficients(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uu(0.05, 3.0), rr(-1.0, 2.0);
  Coefficients c{std::vector<double>(n), std::vector<double>(n)};
  for (auto& x : c.u) x = uu(rng);
  for (auto& x : c.rho) x = rr(rng);
  return c;
}

void BM_AssortmentLp(benchmark::State& state) {
  const auto c = random_coefficients(14, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rra::assortment_oracle(c.u, c.rho, 5).objective);
}
BENCHMARK(BM_AssortmentLp)->Unit(benchmark::kMicrosecond);

void BM_AssortmentEnumeration(benchmark::State& state) {
  const auto c = random_coefficients(14, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rra::enumerate_assortments(c.u, c.rho, 5).objective);
}
BENCHMARK(BM_AssortmentEnumeration)->Unit(benchmark::kMicrosecond);

void BM_MnlKappa(benchmark::State& state) {
  rra::ExperimentConfig cfg;
  cfg.synthetic.n_types = 50;
  const rra::LoadedInstance li = rra::materialize_instance(cfg);
  const rra::MnlAssortmentKappa kappa(li.mnl);
  // Uniform weights make every coefficient negative; keep the resource
  // weights small so that the LP has something to choose.
  const rra::WeightVector w{{0.3, 0.3, 0.3}, std::vector<double>(14, 0.1 / 14.0)};
  rra::TypeIndex j = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kappa.best_action(w, j));
    j = j % 50 + 1;
  }
}
BENCHMARK(BM_MnlKappa)->Unit(benchmark::kMicrosecond);

}  // namespace
