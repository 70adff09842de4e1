#include <benchmark/benchmark.h>

#include "graphukf/experiment.hpp"
#include "graphukf/filter.hpp"

using namespace graphukf;

namespace {

ExperimentConfig bench_config(int trials) {
  ExperimentConfig c;
  c.m_trials = trials;
  c.d_steps = 50;
  c.noise_scenario = "caseB1";
  return c;
}

void BM_RunSerial(benchmark::State& state) {
  const auto config = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RunParallel(benchmark::State& state) {
  const auto config = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FilterStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ExperimentConfig c;
  c.n = n;
  c.filters = {"gsp-gr-srukf"};
  const auto setup = prepare_experiment(c);
  const auto init = FilterState::make(benchmark_initial_state(n), 4 * Eigen::MatrixXd::Identity(n, n), true);
  const Eigen::VectorXd y = setup.model.h(benchmark_initial_state(n));
  for (auto _ : state) benchmark::DoNotOptimize(step(init, y, setup.model, setup.basis, setup.filters[0]));
}

}  // namespace

BENCHMARK(BM_RunSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FilterStep)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
