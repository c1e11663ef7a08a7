#include <benchmark/benchmark.h>

#include <random>

#include "explainkit/data.hpp"
#include "explainkit/tree.hpp"

using namespace explainkit;

static void BM_fit_tree(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-1, 1);
  Matrix X;
  X.n_rows = n;
  X.cols.resize(10);
  std::vector<double> y(n), w(n, 1.0);
  for (auto& col : X.cols) {
    col.resize(n);
    for (auto& v : col) v = unif(rng);
  }
  for (std::size_t i = 0; i < n; ++i) y[i] = X(i, 0) * X(i, 1) + 0.1 * unif(rng);

  TreeConfig cfg;
  cfg.max_depth = static_cast<int>(state.range(1));
  cfg.min_samples_leaf = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_tree(X, y, w, cfg, {}));
  }
}
BENCHMARK(BM_fit_tree)->Args({2000, 4})->Args({2000, 6})->Args({20000, 6});
