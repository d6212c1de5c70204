#include <benchmark/benchmark.h>

#include "surropt/chain_sim.hpp"
#include "surropt/gbdt.hpp"
#include "surropt/pipeline.hpp"
#include "surropt/ridge.hpp"
#include "surropt/svr.hpp"
#include "surropt/two_stage.hpp"

namespace surropt {
namespace {

// Mid-horizon state and labels from a short oracle run.
const GeneratedData& sample_run() {
  static const GeneratedData data = [] {
    ExperimentConfig c;
    c.seed = 5;
    c.horizon_days = 300;
    return generate_dataset(c);
  }();
  return data;
}

void BM_SaaSolve(benchmark::State& st) {
  const auto& g = sample_run();
  const auto& state = g.trajectory.states[150];
  DemandModel demand(reference_demand_configs());
  Rng rng = make_rng(1);
  const auto scenarios = demand.sample_days(rng, static_cast<std::size_t>(st.range(0)));
  const bool aggregate = st.range(1) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(solve_stage_one(state, CostParams{}, scenarios, RoundingMode::kNearest, aggregate));
}
BENCHMARK(BM_SaaSolve)->Args({50, 1})->Args({50, 0})->Args({10, 1})->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& st) {
  const auto& g = sample_run();
  const auto& state = g.trajectory.states[150];
  const auto& decision = g.trajectory.applied[150];
  const auto& demand = g.demands[150];
  for (auto _ : st) benchmark::DoNotOptimize(step(state, decision, demand, CostParams{}));
}
BENCHMARK(BM_Step);

void BM_RidgeFit(benchmark::State& st) {
  const auto& data = sample_run().dataset;
  for (auto _ : st) benchmark::DoNotOptimize(fit_ridge(data, RidgeOptions{}));
}
BENCHMARK(BM_RidgeFit)->Unit(benchmark::kMillisecond);

void BM_GbdtFit(benchmark::State& st) {
  const auto& data = sample_run().dataset;
  GbdtHyper h;
  h.n_iterations = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(fit_gbdt(data, h, LossSpec{}));
}
BENCHMARK(BM_GbdtFit)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SvrFit(benchmark::State& st) {
  const auto& data = sample_run().dataset;
  SvrOptions opt;
  opt.c_grid = {10.0};
  for (auto _ : st) benchmark::DoNotOptimize(fit_svr(data, opt));
}
BENCHMARK(BM_SvrFit)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& st) {
  const auto& g = sample_run();
  GbdtHyper h;
  h.n_iterations = 200;
  const auto gbdt = fit_gbdt(g.dataset, h, LossSpec{});
  const auto x = g.trajectory.states[10].to_features();
  for (auto _ : st) benchmark::DoNotOptimize(gbdt.predict(x));
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace surropt

BENCHMARK_MAIN();
