#include "explainkit/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace explainkit {

Fidelity fidelity_metrics(const std::vector<double>& predicted,
                          const std::vector<double>& target) {
  if (predicted.size() != target.size() || target.empty())
    throw std::invalid_argument("fidelity_metrics: inconsistent input");
  const double n = static_cast<double>(target.size());

  double mean = 0;
  for (double y : target) mean += y;
  mean /= n;

  double sse = 0, sst = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    sse += (target[i] - predicted[i]) * (target[i] - predicted[i]);
    sst += (target[i] - mean) * (target[i] - mean);
  }

  Fidelity f;
  f.rmse = std::sqrt(sse / n);
  // rounding can leave sst at ~1e-34 for a constant target; treat as zero
  if (sst / n < 1e-24 * std::max(1.0, mean * mean)) {
    f.r2 = 1.0;
    f.degenerate = true;
  } else {
    f.r2 = 1.0 - sse / sst;
  }

  double ape = 0;
  int used = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (std::abs(target[i]) < 1e-6) {
      ++f.mape_excluded;
      continue;
    }
    ape += std::abs((target[i] - predicted[i]) / target[i]);
    ++used;
  }
  f.mape = used > 0 ? ape / used : 0.0;
  return f;
}

namespace {

void collect_interactions(const DecisionTree& tree, int idx, int depth,
                          std::vector<InteractionPair>& out) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) return;
  for (int child : {n.left, n.right}) {
    const auto& c = tree.nodes[static_cast<std::size_t>(child)];
    if (!c.is_leaf() && c.split_feature != n.split_feature) {
      InteractionPair pair{n.split_feature, c.split_feature, depth};
      if (std::find(out.begin(), out.end(), pair) == out.end()) out.push_back(pair);
    }
    collect_interactions(tree, child, depth + 1, out);
  }
}

Fidelity evaluate_tree(const DecisionTree& tree, const Matrix& X,
                       const std::vector<double>& target,
                       const std::vector<std::size_t>& rows) {
  std::vector<double> pred, truth;
  pred.reserve(rows.size());
  truth.reserve(rows.size());
  std::vector<double> row(X.n_cols());
  for (auto r : rows) {
    for (std::size_t c = 0; c < X.n_cols(); ++c) row[c] = X(r, c);
    pred.push_back(predict_tree(tree, row));
    truth.push_back(target[r]);
  }
  return fidelity_metrics(pred, truth);
}

}  // namespace

SurrogateReport extract_surrogate(const ScoreFn& score, const Dataset& data, int depth) {
  if (depth < 1) throw std::invalid_argument("extract_surrogate: depth must be >= 1");
  if (data.n_rows() == 0) throw std::invalid_argument("extract_surrogate: empty data");

  const std::vector<double> target = score(data.features);
  std::vector<double> weights(data.n_rows(), 1.0);
  TreeConfig cfg{depth, 1};

  SurrogateReport report;
  report.tree = fit_tree(data.features, target, weights, cfg);

  std::vector<std::size_t> all(data.n_rows());
  std::iota(all.begin(), all.end(), 0);
  report.fidelity = evaluate_tree(report.tree, data.features, target, all);

  report.importance.assign(data.n_cols(), 0.0);
  for (const auto& n : report.tree.nodes)
    if (!n.is_leaf()) report.importance[static_cast<std::size_t>(n.split_feature)] += n.gain;

  collect_interactions(report.tree, 0, 0, report.interactions);
  return report;
}

CvReport cv_stability(const ScoreFn& score, const Dataset& data, int depth, int folds,
                      std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cv_stability: folds must be >= 2");
  const std::size_t n = data.n_rows();
  if (n < static_cast<std::size_t>(folds))
    throw std::invalid_argument("cv_stability: fold too small to fit");

  const std::vector<double> target = score(data.features);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<double> weights(n, 1.0);
  TreeConfig cfg{depth, 1};
  std::vector<int> all_features(data.n_cols());
  std::iota(all_features.begin(), all_features.end(), 0);

  std::vector<Fidelity> per_fold;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> hold, fit;
    for (std::size_t i = 0; i < n; ++i)
      (static_cast<int>(i % static_cast<std::size_t>(folds)) == f ? hold : fit)
          .push_back(idx[i]);
    if (fit.empty() || hold.empty())
      throw std::invalid_argument("cv_stability: fold too small to fit");
    std::sort(fit.begin(), fit.end());
    std::sort(hold.begin(), hold.end());
    DecisionTree tree =
        fit_tree(data.features, target, weights, fit, all_features, cfg, {}, {});
    per_fold.push_back(evaluate_tree(tree, data.features, target, hold));
  }

  auto stats = [&](auto getter) {
    MetricStats s;
    for (const auto& f : per_fold) s.mean += getter(f);
    s.mean /= per_fold.size();
    double ss = 0;
    for (const auto& f : per_fold) ss += (getter(f) - s.mean) * (getter(f) - s.mean);
    s.std = std::sqrt(ss / per_fold.size());
    return s;
  };

  CvReport cv;
  cv.folds = folds;
  cv.r2 = stats([](const Fidelity& f) { return f.r2; });
  cv.rmse = stats([](const Fidelity& f) { return f.rmse; });
  cv.mape = stats([](const Fidelity& f) { return f.mape; });
  return cv;
}

namespace {

void dot_node(const DecisionTree& tree, int idx, const std::vector<std::string>& names,
              std::ostringstream& out) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) {
    out << "  n" << idx << " [shape=box, label=\"" << n.leaf_value << "\\ncover=" << n.cover
        << "\"];\n";
    return;
  }
  out << "  n" << idx << " [label=\"" << names[static_cast<std::size_t>(n.split_feature)]
      << " < " << n.threshold << "\"];\n";
  dot_node(tree, n.left, names, out);
  dot_node(tree, n.right, names, out);
  out << "  n" << idx << " -> n" << n.left << " [label=\"yes\"];\n";
  out << "  n" << idx << " -> n" << n.right << " [label=\"no\"];\n";
}

}  // namespace

std::string export_dot(const DecisionTree& tree, const std::vector<std::string>& feature_names) {
  for (const auto& n : tree.nodes)
    if (!n.is_leaf() &&
        static_cast<std::size_t>(n.split_feature) >= feature_names.size())
      throw std::invalid_argument("export_dot: feature names do not cover split indices");
  std::ostringstream out;
  out.precision(6);
  out << "digraph surrogate {\n";
  dot_node(tree, 0, feature_names, out);
  out << "}\n";
  return out.str();
}

std::string surrogate_report_to_json(const SurrogateReport& report,
                                     const std::vector<std::string>& feature_names) {
  nlohmann::json j;
  j["fidelity"] = {{"r2", report.fidelity.r2},
                   {"rmse", report.fidelity.rmse},
                   {"mape", report.fidelity.mape},
                   {"mape_excluded", report.fidelity.mape_excluded},
                   {"degenerate", report.fidelity.degenerate}};
  if (report.cv.folds > 0) {
    j["cv"] = {{"folds", report.cv.folds},
               {"r2", {{"mean", report.cv.r2.mean}, {"std", report.cv.r2.std}}},
               {"rmse", {{"mean", report.cv.rmse.mean}, {"std", report.cv.rmse.std}}},
               {"mape", {{"mean", report.cv.mape.mean}, {"std", report.cv.mape.std}}}};
  }
  nlohmann::json imp = nlohmann::json::array();
  for (std::size_t f = 0; f < report.importance.size(); ++f)
    imp.push_back({{"feature", feature_names[f]}, {"gain", report.importance[f]}});
  j["importance"] = std::move(imp);
  nlohmann::json inter = nlohmann::json::array();
  for (const auto& [a, b, d] : report.interactions)
    inter.push_back({{"parent", feature_names[static_cast<std::size_t>(a)]},
                     {"child", feature_names[static_cast<std::size_t>(b)]},
                     {"parent_depth", d}});
  j["interactions"] = std::move(inter);
  j["tree_depth"] = tree_depth(report.tree);
  return j.dump(2);
}

}  // namespace explainkit
