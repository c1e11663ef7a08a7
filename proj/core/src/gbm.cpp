#include "explainkit/gbm.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace explainkit {

double GbmModel::margin(const std::vector<double>& row) const {
  double m = base_score;
  for (int t = 0; t < best_round; ++t)
    m += learning_rate * predict_tree(trees[static_cast<std::size_t>(t)], row);
  return m;
}

double GbmModel::predict_row(const std::vector<double>& row) const {
  return logistic(margin(row));
}

ScoreFn GbmModel::score_fn() const {
  GbmModel copy = *this;
  return [copy = std::move(copy)](const Matrix& rows) {
    return predict(copy, rows);
  };
}

std::vector<double> predict(const GbmModel& model, const Matrix& rows) {
  std::vector<double> out(rows.n_rows);
  std::vector<double> row(rows.n_cols());
  for (std::size_t r = 0; r < rows.n_rows; ++r) {
    for (std::size_t c = 0; c < rows.n_cols(); ++c) row[c] = rows(r, c);
    out[r] = model.predict_row(row);
  }
  return out;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("auc: inconsistent input");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += static_cast<std::size_t>(y);
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: single-class input");

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // average ranks over tie groups
  double rank_sum_pos = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (labels[idx[k]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1) / 2.0) / (np * nn);
}

double log_loss(const std::vector<double>& probs, const std::vector<int>& labels) {
  double s = 0;
  constexpr double eps = 1e-15;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], eps, 1.0 - eps);
    s += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return s / static_cast<double>(probs.size());
}

GbmModel fit_gbm(const Dataset& train, const Dataset& valid, const GbmConfig& config,
                 const std::vector<int>& constraints) {
  if (!train.has_labels() || !valid.has_labels())
    throw std::invalid_argument("fit_gbm: labels required in train and validation data");
  if (train.n_rows() == 0 || valid.n_rows() == 0)
    throw std::invalid_argument("fit_gbm: empty dataset");
  if (train.n_cols() != valid.n_cols())
    throw std::invalid_argument("fit_gbm: feature layout mismatch");
  if (!constraints.empty() && constraints.size() != train.n_cols())
    throw std::invalid_argument("fit_gbm: constraints length mismatch");

  const std::size_t n = train.n_rows();
  const std::size_t p = train.n_cols();

  double pos = 0;
  for (int y : train.labels) pos += y;
  const double mean = pos / static_cast<double>(n);
  if (mean <= 0.0 || mean >= 1.0) throw std::invalid_argument("fit_gbm: single-class labels");

  GbmModel model;
  model.learning_rate = config.learning_rate;
  model.base_score = std::log(mean / (1.0 - mean));
  model.constraints = constraints.empty() ? std::vector<int>(p, 0) : constraints;
  model.feature_names = train.feature_names;

  std::vector<double> margin_train(n, model.base_score);
  std::vector<double> margin_valid(valid.n_rows(), model.base_score);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> row_pool(n);
  std::iota(row_pool.begin(), row_pool.end(), 0);
  std::vector<int> col_pool(static_cast<int>(p));
  std::iota(col_pool.begin(), col_pool.end(), 0);

  const auto n_sub = static_cast<std::size_t>(
      std::llround(config.subsample * static_cast<double>(n)));
  const auto p_sub = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config.colsample * static_cast<double>(p))));

  std::vector<double> targets(n), weights(n);
  TreeConfig tree_cfg{config.max_depth, config.min_samples_leaf};
  ValueBounds leaf_bounds{-4.0, 4.0};

  double best_auc = -1.0;
  int best_round = 0;

  for (int round = 0; round < config.max_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = logistic(margin_train[i]);
      const double hess = std::max(prob * (1.0 - prob), 1e-12);
      targets[i] = (train.labels[i] - prob) / hess;  // Newton leaf = sum resid / sum hess
      weights[i] = hess;
    }

    std::shuffle(row_pool.begin(), row_pool.end(), rng);
    std::vector<std::size_t> rows(row_pool.begin(),
                                  row_pool.begin() + static_cast<std::ptrdiff_t>(n_sub));
    std::sort(rows.begin(), rows.end());
    std::shuffle(col_pool.begin(), col_pool.end(), rng);
    std::vector<int> cols(col_pool.begin(), col_pool.begin() + static_cast<std::ptrdiff_t>(p_sub));
    std::sort(cols.begin(), cols.end());

    DecisionTree tree = fit_tree(train.features, targets, weights, rows, cols, tree_cfg,
                                 model.constraints, leaf_bounds);

    std::vector<double> row_buf(p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < p; ++c) row_buf[c] = train.features(i, c);
      margin_train[i] += config.learning_rate * predict_tree(tree, row_buf);
    }
    std::vector<double> valid_scores(valid.n_rows());
    for (std::size_t i = 0; i < valid.n_rows(); ++i) {
      for (std::size_t c = 0; c < p; ++c) row_buf[c] = valid.features(i, c);
      margin_valid[i] += config.learning_rate * predict_tree(tree, row_buf);
      valid_scores[i] = logistic(margin_valid[i]);
    }
    model.trees.push_back(std::move(tree));

    const double round_auc = auc(valid_scores, valid.labels);
    if (round_auc > best_auc) {
      best_auc = round_auc;
      best_round = round + 1;
    }
    if (config.early_stopping_rounds > 0 &&
        round + 1 - best_round >= config.early_stopping_rounds)
      break;
  }

  model.best_round = best_round;
  model.best_validation_auc = best_auc;
  model.trained_rounds = static_cast<int>(model.trees.size());
  return model;
}

namespace {

using nlohmann::json;

json node_to_json(const DecisionTree& tree, int idx) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  json j;
  j["cover"] = n.cover;
  if (n.is_leaf()) {
    j["leaf_value"] = n.leaf_value;
  } else {
    j["split_feature"] = n.split_feature;
    j["threshold"] = n.threshold;
    j["gain"] = n.gain;
    j["left"] = node_to_json(tree, n.left);
    j["right"] = node_to_json(tree, n.right);
  }
  return j;
}

int node_from_json(const json& j, DecisionTree& tree) {
  const int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes.back().cover = j.at("cover").get<double>();
  if (j.contains("leaf_value")) {
    tree.nodes[static_cast<std::size_t>(idx)].leaf_value = j.at("leaf_value").get<double>();
  } else {
    const int l = node_from_json(j.at("left"), tree);
    const int r = node_from_json(j.at("right"), tree);
    auto& n = tree.nodes[static_cast<std::size_t>(idx)];
    n.split_feature = j.at("split_feature").get<int>();
    n.threshold = j.at("threshold").get<double>();
    n.gain = j.value("gain", 0.0);
    n.left = l;
    n.right = r;
  }
  return idx;
}

}  // namespace

std::string model_to_json(const GbmModel& model) {
  json j;
  j["format"] = "explainkit-gbm";
  j["version"] = 1;
  j["learning_rate"] = model.learning_rate;
  j["base_score"] = model.base_score;
  j["constraints"] = model.constraints;
  j["best_round"] = model.best_round;
  j["trained_rounds"] = model.trained_rounds;
  j["best_validation_auc"] = model.best_validation_auc;
  j["feature_names"] = model.feature_names;
  json trees = json::array();
  for (const auto& t : model.trees) {
    json jt;
    jt["max_depth"] = t.max_depth;
    jt["feature_count"] = t.feature_count;
    jt["root"] = node_to_json(t, 0);
    trees.push_back(std::move(jt));
  }
  j["trees"] = std::move(trees);
  return j.dump(2);
}

GbmModel model_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "explainkit-gbm")
    throw std::runtime_error("model_from_json: unrecognized model document");
  GbmModel model;
  model.learning_rate = j.at("learning_rate").get<double>();
  model.base_score = j.at("base_score").get<double>();
  model.constraints = j.at("constraints").get<std::vector<int>>();
  model.best_round = j.at("best_round").get<int>();
  model.trained_rounds = j.value("trained_rounds", 0);
  model.best_validation_auc = j.value("best_validation_auc", 0.0);
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& jt : j.at("trees")) {
    DecisionTree t;
    t.max_depth = jt.at("max_depth").get<int>();
    t.feature_count = jt.at("feature_count").get<int>();
    node_from_json(jt.at("root"), t);
    model.trees.push_back(std::move(t));
  }
  return model;
}

void save_model(const GbmModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "'");
  out << model_to_json(model) << '\n';
}

GbmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace explainkit
