#include <benchmark/benchmark.h>

#include <random>

#include "explainkit/data.hpp"
#include "explainkit/gbm.hpp"
#include "explainkit/shapley.hpp"

using namespace explainkit;

namespace {

GbmModel trained_model(int max_depth, int rounds) {
  SimConfig sim;
  sim.n_rows = 2000;
  const Dataset data = simulate_signal(sim);
  auto [train, valid] = split(data, 0.3, kDefaultSeed);
  GbmConfig cfg;
  cfg.max_depth = max_depth;
  cfg.max_rounds = rounds;
  cfg.early_stopping_rounds = 0;
  return fit_gbm(train, valid, cfg);
}

}  // namespace

static void BM_shapley_exact(benchmark::State& state) {
  const GbmModel model = trained_model(static_cast<int>(state.range(0)), 30);
  const std::vector<double> x(12, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(shapley_exact(model, x));
}
BENCHMARK(BM_shapley_exact)->Arg(3)->Arg(4)->Arg(5);

static void BM_shapley_sampled(benchmark::State& state) {
  const GbmModel model = trained_model(4, 30);
  const std::vector<double> x(12, 0.25);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        shapley_sampled(model, x, static_cast<int>(state.range(0)), kDefaultSeed));
}
BENCHMARK(BM_shapley_sampled)->Arg(100)->Arg(1000);
