#pragma once

// Independent test oracles. Everything here is written directly from first
// principles and must not reuse the implementation paths it checks.

#include <cmath>
#include <random>
#include <vector>

#include "explainkit/gbm.hpp"
#include "explainkit/shapley.hpp"
#include "explainkit/tree.hpp"

namespace oracles {

using explainkit::DecisionTree;
using explainkit::GbmModel;
using explainkit::Matrix;
using explainkit::TreeNode;

// --- brute-force Shapley over all global subsets (Eq.-style enumeration) ---

inline double naive_tree_expectation(const DecisionTree& tree, int idx,
                                     const std::vector<double>& x,
                                     const std::vector<bool>& present) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) return n.leaf_value;
  if (present[static_cast<std::size_t>(n.split_feature)])
    return naive_tree_expectation(
        tree, x[static_cast<std::size_t>(n.split_feature)] < n.threshold ? n.left : n.right, x,
        present);
  const auto& l = tree.nodes[static_cast<std::size_t>(n.left)];
  const auto& r = tree.nodes[static_cast<std::size_t>(n.right)];
  return (l.cover * naive_tree_expectation(tree, n.left, x, present) +
          r.cover * naive_tree_expectation(tree, n.right, x, present)) /
         n.cover;
}

inline double naive_value(const GbmModel& model, const std::vector<double>& x,
                          const std::vector<bool>& present) {
  double v = model.base_score;
  for (int t = 0; t < model.best_round; ++t)
    v += model.learning_rate *
         naive_tree_expectation(model.trees[static_cast<std::size_t>(t)], 0, x, present);
  return v;
}

inline double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// phi_j = sum over S subseteq P\{j} of |S|!(P-|S|-1)!/P! * [v(S u {j}) - v(S)]
inline std::vector<double> naive_shapley(const GbmModel& model, const std::vector<double>& x) {
  const int p = static_cast<int>(model.feature_count());
  std::vector<double> phi(static_cast<std::size_t>(p), 0.0);
  const double pfact = factorial(p);
  for (int j = 0; j < p; ++j) {
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
      if (mask & (1u << j)) continue;
      std::vector<bool> present(static_cast<std::size_t>(p), false);
      int s = 0;
      for (int b = 0; b < p; ++b)
        if (mask & (1u << b)) {
          present[static_cast<std::size_t>(b)] = true;
          ++s;
        }
      const double without = naive_value(model, x, present);
      present[static_cast<std::size_t>(j)] = true;
      const double with = naive_value(model, x, present);
      phi[static_cast<std::size_t>(j)] +=
          factorial(s) * factorial(p - s - 1) / pfact * (with - without);
    }
  }
  return phi;
}

// --- random tree generator with consistent covers ---

inline int random_subtree(DecisionTree& tree, std::mt19937_64& rng, int depth, int max_depth,
                          int n_features, double cover) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> feat(0, n_features - 1);
  std::bernoulli_distribution split_here(depth < max_depth ? 0.75 : 0.0);

  const int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes.back().cover = cover;
  if (!split_here(rng)) {
    tree.nodes[static_cast<std::size_t>(idx)].leaf_value = unif(rng);
    return idx;
  }
  std::uniform_real_distribution<double> frac(0.2, 0.8);
  const double left_cover = std::max(1.0, std::floor(cover * frac(rng)));
  const int f = feat(rng);
  const double thr = unif(rng);
  const int l = random_subtree(tree, rng, depth + 1, max_depth, n_features, left_cover);
  const int r = random_subtree(tree, rng, depth + 1, max_depth, n_features, cover - left_cover);
  auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  n.split_feature = f;
  n.threshold = thr;
  n.left = l;
  n.right = r;
  return idx;
}

inline DecisionTree random_tree(std::mt19937_64& rng, int max_depth, int n_features) {
  DecisionTree tree;
  tree.max_depth = max_depth;
  tree.feature_count = n_features;
  random_subtree(tree, rng, 0, max_depth, n_features, 64.0);
  if (tree.nodes.size() == 1) {  // force at least one split for interesting cases
    tree.nodes.clear();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> feat(0, n_features - 1);
    TreeNode root, l, r;
    root.split_feature = feat(rng);
    root.threshold = unif(rng);
    root.cover = 64;
    root.left = 1;
    root.right = 2;
    l.cover = 32;
    l.leaf_value = unif(rng);
    r.cover = 32;
    r.leaf_value = unif(rng);
    tree.nodes = {root, l, r};
  }
  return tree;
}

inline GbmModel wrap_trees(std::vector<DecisionTree> trees, int n_features,
                           double learning_rate = 1.0, double base_score = 0.0) {
  GbmModel m;
  m.trees = std::move(trees);
  m.learning_rate = learning_rate;
  m.base_score = base_score;
  m.best_round = static_cast<int>(m.trees.size());
  m.trained_rounds = m.best_round;
  m.constraints.assign(static_cast<std::size_t>(n_features), 0);
  for (int f = 0; f < n_features; ++f) m.feature_names.push_back("f" + std::to_string(f));
  return m;
}

// --- weighted least squares via Gaussian elimination on normal equations ---

inline std::vector<double> weighted_least_squares(const Matrix& X,
                                                  const std::vector<double>& y,
                                                  const std::vector<double>& w) {
  const std::size_t p = X.n_cols() + 1;  // intercept first
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  auto design = [&](std::size_t i, std::size_t j) {
    return j == 0 ? 1.0 : X(i, j - 1);
  };
  for (std::size_t i = 0; i < X.n_rows; ++i)
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r][c] += w[i] * design(i, r) * design(i, c);
      a[r][p] += w[i] * design(i, r) * y[i];
    }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col || a[col][col] == 0.0) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= p; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> beta(p);
  for (std::size_t r = 0; r < p; ++r) beta[r] = a[r][p] / a[r][r];
  return beta;
}

// KKT residual of the standardized weighted LASSO the solver claims to
// minimize; recomputes the standardization independently.
inline double lasso_kkt_residual(const Matrix& design, const std::vector<double>& y,
                                 const std::vector<double>& w, double lambda,
                                 double intercept, const std::vector<double>& coef) {
  const std::size_t n = design.n_rows, p = design.n_cols();
  double W = 0;
  for (double v : w) W += v;
  double residual = 0;

  // intercept stationarity: weighted mean residual must vanish
  double mr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = intercept;
    for (std::size_t j = 0; j < p; ++j) pred += coef[j] * design(i, j);
    mr += w[i] * (y[i] - pred);
  }
  residual = std::max(residual, std::abs(mr / W));

  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += w[i] * design(i, j);
    mean /= W;
    double var = 0;
    for (std::size_t i = 0; i < n; ++i)
      var += w[i] / W * (design(i, j) - mean) * (design(i, j) - mean);
    const double scale = std::sqrt(var);
    if (scale == 0.0) continue;
    double grad = 0;  // (1/W) sum w * zs_j * resid
    for (std::size_t i = 0; i < n; ++i) {
      double pred = intercept;
      for (std::size_t k = 0; k < p; ++k) pred += coef[k] * design(i, k);
      grad += w[i] / W * (design(i, j) - mean) / scale * (y[i] - pred);
    }
    const double beta_std = coef[j] * scale;
    if (beta_std != 0.0)
      residual = std::max(residual, std::abs(grad - lambda * (beta_std > 0 ? 1.0 : -1.0)));
    else
      residual = std::max(residual, std::max(0.0, std::abs(grad) - lambda));
  }
  return residual;
}

}  // namespace oracles
