#include <benchmark/benchmark.h>

#include "rra/experiment.h"

namespace {

void BM_Episode(benchmark::State& state, const char* policy) {
  rra::ExperimentConfig cfg;
  cfg.synthetic.n_types = 1000;
  cfg.xi = 1.0 / 200.0;
  const rra::LoadedInstance li = rra::materialize_instance(cfg);
  const rra::PolicyContext ctx = rra::make_context(li);
  const rra::SteadyStateResult ss = rra::solve_benchmark(li, ctx);
  const auto T = static_cast<rra::TimeStep>(state.range(0));
  for (auto _ : state) {
    auto p = rra::make_policy(policy, ctx, {}, &ss, li.instance.num_types());
    const rra::Trajectory traj = rra::run_episode(li.instance, *p, rra::EpisodeOptions{T, 1});
    benchmark::DoNotOptimize(traj.steps.back().cum_rewards[0]);
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK_CAPTURE(BM_Episode, imwu, "imwu")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, osa, "osa")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, greedy, "greedy")->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
