#include <benchmark/benchmark.h>

#include <random>

#include "explainkit/lime.hpp"

using namespace explainkit;

static void BM_fit_lasso(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t p = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-1, 1);
  Matrix X;
  X.n_rows = n;
  X.cols.resize(p);
  std::vector<double> y(n), w(n);
  for (auto& col : X.cols) {
    col.resize(n);
    for (auto& v : col) v = unif(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 2.0 * X(i, 0) - X(i, 1) + 0.1 * unif(rng);
    w[i] = 0.1 + std::abs(unif(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_lasso(X, y, w, 0.01));
}
BENCHMARK(BM_fit_lasso)->Args({1000, 12})->Args({5000, 12})->Args({5000, 48});

BENCHMARK_MAIN();
