// Serial versus OpenMP cost of a short tracking run on the 12-cell scenario.

#include <benchmark/benchmark.h>

#include "celltrack/filters.hpp"
#include "celltrack/simulator.hpp"

using namespace celltrack;

namespace {

void run(benchmark::State& state, Variant v, Execution e) {
  auto [truth, frames] = fixed_scenario_12cells(1);
  frames.resize(30);
  const auto m = SystemModel::cell_default();
  FilterConfig cfg;
  cfg.variant = v;
  cfg.execution = e;
  cfg.gibbs_samples = static_cast<std::size_t>(state.range(0));
  cfg.max_hypotheses = cfg.gibbs_samples;
  for (auto _ : state) benchmark::DoNotOptimize(run_sequence(frames, m, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}

void BM_PaSerial(benchmark::State& s) { run(s, Variant::PA, Execution::Serial); }
void BM_PaParallel(benchmark::State& s) { run(s, Variant::PA, Execution::Parallel); }
void BM_UaSerial(benchmark::State& s) { run(s, Variant::UA, Execution::Serial); }
void BM_UaParallel(benchmark::State& s) { run(s, Variant::UA, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_PaSerial)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PaParallel)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UaSerial)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UaParallel)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
