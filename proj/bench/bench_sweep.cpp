// Serial reference vs OpenMP trial loop on a small MSE sweep.

#include "pnest/harness.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

pnest::SweepSpec bench_spec(int trials) {
  pnest::SweepSpec s;
  s.base.trials = trials;
  s.values = {"10", "20"};
  s.metrics = pnest::metric_set({pnest::Metric::PhaseMseOneshot, pnest::Metric::PhaseMseWiener,
                                 pnest::Metric::ChannelMse, pnest::Metric::CrlbOneshot});
  return s;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto spec = bench_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pnest::run_sweep_serial(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}

void BM_SweepParallel(benchmark::State& state) {
  const auto spec = bench_spec(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pnest::run_sweep(spec, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}

void parallel_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_num_procs();
  for (int t = 1; t <= max_threads; t *= 2) b->Args({64, t});
  if ((max_threads & (max_threads - 1)) != 0) b->Args({64, max_threads});
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
