#include <benchmark/benchmark.h>

#include "rra/colgen.h"
#include "rra/experiment.h"
#include "rra/lp_builders.h"
#include "rra/oracle.h"
#include "rra/random_instance.h"

namespace {

rra::LoadedInstance synthetic(std::size_t n_types) {
  rra::ExperimentConfig c;
  c.synthetic.n_types = n_types;
  c.xi = 1.0 / 200.0;
  return rra::materialize_instance(c);
}

void BM_DenseLpS(benchmark::State& state) {
  const rra::LoadedInstance li = synthetic(static_cast<std::size_t>(state.range(0)));
  const rra::MeanTable means = rra::MeanTable::from_instance(li.instance);
  for (auto _ : state) {
    auto r = rra::solve_lp_s_dense(means, li.instance.arrival_probs(), li.instance.capacities());
    benchmark::DoNotOptimize(r.lambda);
  }
}
BENCHMARK(BM_DenseLpS)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ColgenLpS(benchmark::State& state) {
  const rra::LoadedInstance li = synthetic(static_cast<std::size_t>(state.range(0)));
  const rra::PolicyContext ctx = rra::make_context(li);
  for (auto _ : state) {
    auto r = rra::solve_benchmark(li, ctx);
    benchmark::DoNotOptimize(r.lambda);
  }
}
BENCHMARK(BM_ColgenLpS)->Arg(20)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ExpandedLp(benchmark::State& state) {
  rra::Rng gen = rra::make_stream(3, 0);
  const rra::Instance inst = rra::random_tabular_instance(rra::small_params(), gen);
  for (auto _ : state) {
    auto s = rra::solve_lp_e_instance(inst, state.range(0));
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_ExpandedLp)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
