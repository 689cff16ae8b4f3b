#include <benchmark/benchmark.h>

#include "pldc/admm.hpp"
#include "pldc/select.hpp"

namespace {

// One ADMM iteration per benchmark iteration, same data for both backends.
void run_steps(benchmark::State& state, pldc::Backend backend) {
  const auto n = static_cast<pldc::Index>(state.range(0));
  const auto d = static_cast<pldc::Index>(state.range(1));
  const pldc::Dataset data = pldc::generate_synthetic(n, d, 0.25, 7).standardized();
  pldc::FitConfig cfg;
  cfg.lambda = 0.1;
  cfg.backend = backend;
  pldc::AdmmSolver solver(data, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(solver.step());
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_StepReference(benchmark::State& state) { run_steps(state, pldc::Backend::reference); }
void BM_StepParallel(benchmark::State& state) { run_steps(state, pldc::Backend::parallel); }

const std::vector<std::vector<int64_t>> kShapes{{25, 50, 100, 200}, {1, 4}};

}  // namespace

BENCHMARK(BM_StepReference)->ArgsProduct(kShapes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StepParallel)->ArgsProduct(kShapes)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
