#include <doctest.h>

#include <cmath>
#include <random>

#include "explainkit/data.hpp"
#include "explainkit/gbm.hpp"
#include "oracles.hpp"

using namespace explainkit;

namespace {

Dataset separable(std::size_t n) {
  Dataset d;
  d.feature_names = {"x"};
  d.features.n_rows = n;
  d.features.cols.resize(1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = unif(rng);
    d.features.cols[0].push_back(v);
    d.labels.push_back(v > 0 ? 1 : 0);
  }
  return d;
}

}  // namespace

TEST_CASE("auc") {
  CHECK(auc({0.1, 0.9}, {0, 1}) == doctest::Approx(1.0));
  CHECK(auc({0.5, 0.5, 0.5}, {0, 1, 0}) == doctest::Approx(0.5));
  CHECK(auc({0.2, 0.4, 0.6, 0.8}, {0, 1, 0, 1}) == doctest::Approx(0.75));
  CHECK_THROWS(auc({0.1, 0.2}, {1, 1}));
}

TEST_CASE("separable data trains to perfect accuracy with decreasing loss") {
  const Dataset d = separable(200);
  GbmConfig cfg;
  cfg.subsample = 1.0;
  cfg.colsample = 1.0;
  cfg.max_depth = 1;
  cfg.learning_rate = 0.5;
  cfg.max_rounds = 40;
  cfg.early_stopping_rounds = 40;
  cfg.min_samples_leaf = 1;
  const GbmModel model = fit_gbm(d, d, cfg);

  // replay per-round training log-loss from the stored trees
  std::vector<double> margins(d.n_rows(), model.base_score);
  double prev = 1e18;
  for (const auto& tree : model.trees) {
    std::vector<double> probs(d.n_rows());
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      margins[i] += model.learning_rate * predict_tree(tree, d.features.row(i));
      probs[i] = logistic(margins[i]);
    }
    const double loss = log_loss(probs, d.labels);
    CHECK(loss <= prev + 1e-12);
    prev = loss;
  }

  int correct = 0;
  const auto probs = predict(model, d.features);
  for (std::size_t i = 0; i < d.n_rows(); ++i)
    if ((probs[i] >= 0.5 ? 1 : 0) == d.labels[i]) ++correct;
  CHECK(correct == 200);
}

TEST_CASE("zero trees predict the base rate") {
  GbmModel m = oracles::wrap_trees({}, 2, 0.1, std::log(0.25 / 0.75));
  Matrix rows = Matrix::zeros(3, 2);
  for (double p : predict(m, rows)) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("single stump closed form") {
  DecisionTree stump;
  stump.feature_count = 1;
  stump.max_depth = 1;
  TreeNode root, l, r;
  root.split_feature = 0;
  root.threshold = 0.0;
  root.left = 1;
  root.right = 2;
  root.cover = 2;
  l.leaf_value = -1;
  l.cover = 1;
  r.leaf_value = 1;
  r.cover = 1;
  stump.nodes = {root, l, r};
  GbmModel m = oracles::wrap_trees({stump}, 1, 1.0, 0.0);
  Matrix rows;
  rows.n_rows = 2;
  rows.cols = {{-0.5, 0.5}};
  const auto p = predict(m, rows);
  CHECK(p[0] == doctest::Approx(logistic(-1.0)));
  CHECK(p[1] == doctest::Approx(logistic(1.0)));
}

TEST_CASE("training is deterministic and serialization round-trips losslessly") {
  SimConfig sim{400, 11, 0.1, 0.42};
  const Dataset data = simulate_signal(sim);
  auto [train, valid] = split(data, 0.3, 11);
  GbmConfig cfg;
  cfg.max_rounds = 20;
  cfg.max_depth = 3;
  cfg.seed = 11;
  const GbmModel a = fit_gbm(train, valid, cfg);
  const GbmModel b = fit_gbm(train, valid, cfg);
  CHECK(model_to_json(a) == model_to_json(b));

  const GbmModel back = model_from_json(model_to_json(a));
  CHECK(model_to_json(back) == model_to_json(a));
  const auto pa = predict(a, valid.features);
  const auto pb = predict(back, valid.features);
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("round cover equals the subsample size") {
  SimConfig sim{300, 4, 0.1, 0.42};
  const Dataset data = simulate_signal(sim);
  auto [train, valid] = split(data, 0.3, 4);
  GbmConfig cfg;
  cfg.max_rounds = 5;
  cfg.subsample = 0.8;
  cfg.seed = 4;
  const GbmModel m = fit_gbm(train, valid, cfg);
  const double expected = std::round(0.8 * static_cast<double>(train.n_rows()));
  for (const auto& tree : m.trees) CHECK(tree.root().cover == doctest::Approx(expected));
}

TEST_CASE("prediction is invariant to row permutation") {
  SimConfig sim{100, 8, 0.1, 0.42};
  const Dataset data = simulate_signal(sim);
  auto [train, valid] = split(data, 0.3, 8);
  GbmConfig cfg;
  cfg.max_rounds = 10;
  const GbmModel m = fit_gbm(train, valid, cfg);

  Matrix reversed = valid.features;
  for (auto& col : reversed.cols) std::reverse(col.begin(), col.end());
  const auto straight = predict(m, valid.features);
  auto back = predict(m, reversed);
  std::reverse(back.begin(), back.end());
  for (std::size_t i = 0; i < straight.size(); ++i) CHECK(straight[i] == back[i]);
}

TEST_CASE("fit_gbm rejects bad input") {
  const Dataset d = separable(50);
  Dataset single = d;
  std::fill(single.labels.begin(), single.labels.end(), 1);
  CHECK_THROWS(fit_gbm(single, single, GbmConfig{}));
  Dataset unlabeled = d;
  unlabeled.labels.clear();
  CHECK_THROWS(fit_gbm(unlabeled, d, GbmConfig{}));
}
