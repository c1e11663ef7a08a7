#include "explainkit/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace explainkit {

namespace {

double descend_expectation(const DecisionTree& tree, int idx, const std::vector<double>& x,
                           const std::vector<bool>& present) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) return n.leaf_value;
  if (present[static_cast<std::size_t>(n.split_feature)]) {
    const int next = x[static_cast<std::size_t>(n.split_feature)] < n.threshold ? n.left
                                                                                : n.right;
    return descend_expectation(tree, next, x, present);
  }
  const auto& l = tree.nodes[static_cast<std::size_t>(n.left)];
  const auto& r = tree.nodes[static_cast<std::size_t>(n.right)];
  if (n.cover <= 0) throw std::runtime_error("tree_expectation: zero cover at internal node");
  return (l.cover * descend_expectation(tree, n.left, x, present) +
          r.cover * descend_expectation(tree, n.right, x, present)) /
         n.cover;
}

double interventional_expectation(const DecisionTree& tree, const std::vector<double>& x,
                                  const std::vector<bool>& present, const Matrix& reference) {
  std::vector<double> row(x.size());
  double sum = 0;
  for (std::size_t r = 0; r < reference.n_rows; ++r) {
    for (std::size_t c = 0; c < x.size(); ++c)
      row[c] = present[c] ? x[c] : reference(r, c);
    sum += predict_tree(tree, row);
  }
  return sum / static_cast<double>(reference.n_rows);
}

std::vector<int> tree_features(const DecisionTree& tree) {
  std::vector<int> feats;
  for (const auto& n : tree.nodes)
    if (!n.is_leaf()) feats.push_back(n.split_feature);
  std::sort(feats.begin(), feats.end());
  feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
  return feats;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Shapley subset weight for |S| = s out of p players: s!(p-s-1)!/p!
double shapley_weight(int p, int s) { return 1.0 / (p * binom(p - 1, s)); }

}  // namespace

double tree_expectation(const DecisionTree& tree, const std::vector<double>& x,
                        const std::vector<bool>& present) {
  return descend_expectation(tree, 0, x, present);
}

double tree_expectation(const DecisionTree& tree, const std::vector<double>& x,
                        const std::vector<bool>& present, Marginalization marg,
                        const Matrix* reference) {
  if (marg == Marginalization::cover_weighted) return descend_expectation(tree, 0, x, present);
  if (reference == nullptr || reference->n_rows == 0)
    throw std::invalid_argument("tree_expectation: interventional mode requires reference data");
  return interventional_expectation(tree, x, present, *reference);
}

ShapleyExplanation shapley_exact(const GbmModel& model, const std::vector<double>& x,
                                 Marginalization marg, const Matrix* reference) {
  const int p = static_cast<int>(model.feature_count());
  if (p > 20)
    throw std::invalid_argument("shapley_exact: guarded at <= 20 features; use shapley_sampled");
  if (x.size() != model.feature_count())
    throw std::invalid_argument("shapley_exact: row arity does not match the model");

  ShapleyExplanation e;
  e.method = ShapMethod::exact;
  e.phi.assign(static_cast<std::size_t>(p), 0.0);
  e.missing_mask.assign(static_cast<std::size_t>(p), true);
  e.base_value = model.base_score;

  std::vector<bool> present(static_cast<std::size_t>(p), false);

  for (int t = 0; t < model.best_round; ++t) {
    const auto& tree = model.trees[static_cast<std::size_t>(t)];
    const std::vector<int> feats = tree_features(tree);
    const int k = static_cast<int>(feats.size());

    // expectations over every subset of the features this tree actually uses
    std::vector<double> expect(std::size_t{1} << k);
    for (std::uint32_t mask = 0; mask < expect.size(); ++mask) {
      std::fill(present.begin(), present.end(), false);
      for (int b = 0; b < k; ++b)
        if (mask & (1u << b)) present[static_cast<std::size_t>(feats[static_cast<std::size_t>(b)])] = true;
      expect[mask] = tree_expectation(tree, x, present, marg, reference);
    }
    e.base_value += model.learning_rate * expect[0];

    // weight of a restricted subset of size r, summed over global subsets
    std::vector<double> wtab(static_cast<std::size_t>(k), 0.0);
    for (int r = 0; r < k; ++r)
      for (int m = 0; m <= p - k; ++m)
        wtab[static_cast<std::size_t>(r)] += shapley_weight(p, r + m) * binom(p - k, m);

    for (int b = 0; b < k; ++b) {
      const auto bit = std::uint32_t{1} << b;
      double acc = 0;
      for (std::uint32_t mask = 0; mask < expect.size(); ++mask) {
        if (mask & bit) continue;
        acc += wtab[static_cast<std::size_t>(std::popcount(mask))] *
               (expect[mask | bit] - expect[mask]);
      }
      e.phi[static_cast<std::size_t>(feats[static_cast<std::size_t>(b)])] +=
          model.learning_rate * acc;
    }
  }

  e.margin_prediction = model.margin(x);
  e.prob_prediction = logistic(e.margin_prediction);
  return e;
}

namespace {

// g_x(S) evaluator with per-tree memoization on the restricted feature mask.
struct SubsetValue {
  const GbmModel& model;
  const std::vector<double>& x;
  Marginalization marg;
  const Matrix* reference;
  std::vector<std::vector<int>> feats;  // per tree
  std::vector<std::unordered_map<std::uint64_t, double>> memo;

  explicit SubsetValue(const GbmModel& m, const std::vector<double>& row, Marginalization mg,
                       const Matrix* ref)
      : model(m), x(row), marg(mg), reference(ref) {
    feats.reserve(static_cast<std::size_t>(m.best_round));
    memo.resize(static_cast<std::size_t>(m.best_round));
    for (int t = 0; t < m.best_round; ++t)
      feats.push_back(tree_features(m.trees[static_cast<std::size_t>(t)]));
  }

  double operator()(const std::vector<bool>& present) {
    double v = model.base_score;
    std::vector<bool> restricted(x.size(), false);
    for (int t = 0; t < model.best_round; ++t) {
      const auto& tf = feats[static_cast<std::size_t>(t)];
      std::uint64_t key = 0;
      for (std::size_t b = 0; b < tf.size(); ++b)
        if (present[static_cast<std::size_t>(tf[b])]) key |= std::uint64_t{1} << b;
      auto& m = memo[static_cast<std::size_t>(t)];
      auto it = m.find(key);
      if (it == m.end()) {
        std::fill(restricted.begin(), restricted.end(), false);
        for (std::size_t b = 0; b < tf.size(); ++b)
          if (key & (std::uint64_t{1} << b)) restricted[static_cast<std::size_t>(tf[b])] = true;
        it = m.emplace(key, tree_expectation(model.trees[static_cast<std::size_t>(t)], x,
                                             restricted, marg, reference))
                 .first;
      }
      v += model.learning_rate * it->second;
    }
    return v;
  }
};

}  // namespace

ShapleyExplanation shapley_sampled(const GbmModel& model, const std::vector<double>& x,
                                   int n_permutations, std::uint64_t seed, Marginalization marg,
                                   const Matrix* reference) {
  if (n_permutations < 1)
    throw std::invalid_argument("shapley_sampled: n_permutations must be >= 1");
  const std::size_t p = model.feature_count();

  ShapleyExplanation e;
  e.method = ShapMethod::sampled;
  e.phi.assign(p, 0.0);
  e.missing_mask.assign(p, true);

  SubsetValue value(model, x, marg, reference);
  std::vector<bool> present(p, false);
  e.base_value = value(present);

  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);

  for (int it = 0; it < n_permutations; ++it) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::fill(present.begin(), present.end(), false);
    double prev = e.base_value;
    for (std::size_t j : perm) {
      present[j] = true;
      const double cur = value(present);
      e.phi[j] += cur - prev;
      prev = cur;
    }
  }
  for (double& v : e.phi) v /= n_permutations;

  e.margin_prediction = model.margin(x);
  e.prob_prediction = logistic(e.margin_prediction);

  double phi_sum = 0, abs_sum = 0;
  for (double v : e.phi) {
    phi_sum += v;
    abs_sum += std::abs(v);
  }
  const double residual = e.margin_prediction - e.base_value - phi_sum;
  e.adjustment = std::abs(residual);
  if (abs_sum > 0)
    for (double& v : e.phi) v += residual * std::abs(v) / abs_sum;
  return e;
}

ShapleyExplanation shapley_exhaustive_permutations(const GbmModel& model,
                                                   const std::vector<double>& x) {
  const std::size_t p = model.feature_count();
  if (p > 8)
    throw std::invalid_argument("shapley_exhaustive_permutations: guarded at <= 8 features");

  ShapleyExplanation e;
  e.method = ShapMethod::sampled;
  e.phi.assign(p, 0.0);
  e.missing_mask.assign(p, true);

  SubsetValue value(model, x, Marginalization::cover_weighted, nullptr);
  std::vector<bool> present(p, false);
  e.base_value = value(present);

  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t count = 0;
  do {
    std::fill(present.begin(), present.end(), false);
    double prev = e.base_value;
    for (std::size_t j : perm) {
      present[j] = true;
      const double cur = value(present);
      e.phi[j] += cur - prev;
      prev = cur;
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& v : e.phi) v /= static_cast<double>(count);

  e.margin_prediction = model.margin(x);
  e.prob_prediction = logistic(e.margin_prediction);
  return e;
}

namespace {

void subtree_means(const DecisionTree& tree, int idx, std::vector<double>& means) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) {
    means[static_cast<std::size_t>(idx)] = n.leaf_value;
    return;
  }
  subtree_means(tree, n.left, means);
  subtree_means(tree, n.right, means);
  means[static_cast<std::size_t>(idx)] =
      (tree.nodes[static_cast<std::size_t>(n.left)].cover *
           means[static_cast<std::size_t>(n.left)] +
       tree.nodes[static_cast<std::size_t>(n.right)].cover *
           means[static_cast<std::size_t>(n.right)]) /
      n.cover;
}

}  // namespace

ShapleyExplanation treeinterpreter_path(const GbmModel& model, const std::vector<double>& x) {
  const std::size_t p = model.feature_count();
  ShapleyExplanation e;
  e.method = ShapMethod::path;
  e.phi.assign(p, 0.0);
  e.missing_mask.assign(p, true);
  e.base_value = model.base_score;

  for (int t = 0; t < model.best_round; ++t) {
    const auto& tree = model.trees[static_cast<std::size_t>(t)];
    std::vector<double> means(tree.nodes.size());
    subtree_means(tree, 0, means);
    e.base_value += model.learning_rate * means[0];

    int idx = 0;
    while (!tree.nodes[static_cast<std::size_t>(idx)].is_leaf()) {
      const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
      const int next = x[static_cast<std::size_t>(n.split_feature)] < n.threshold ? n.left
                                                                                  : n.right;
      e.phi[static_cast<std::size_t>(n.split_feature)] +=
          model.learning_rate *
          (means[static_cast<std::size_t>(next)] - means[static_cast<std::size_t>(idx)]);
      idx = next;
    }
  }

  e.margin_prediction = model.margin(x);
  e.prob_prediction = logistic(e.margin_prediction);
  return e;
}

SummaryReport summarize(const GbmModel& model, const Dataset& data, ShapMethod method,
                        std::size_t budget, std::uint64_t seed, int n_permutations) {
  if (data.n_rows() == 0) throw std::invalid_argument("summarize: empty data");
  const std::size_t p = model.feature_count();

  std::vector<std::size_t> rows(data.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  if (budget > 0 && budget < rows.size()) {
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(budget);
    std::sort(rows.begin(), rows.end());
  }

  SummaryReport report;
  report.rows_used = rows;
  report.mean_abs_phi.assign(p, 0.0);
  report.phi_values.assign(p, {});
  report.feature_values.assign(p, {});

  std::vector<double> x(p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < p; ++c) x[c] = data.features(rows[i], c);
    ShapleyExplanation e;
    switch (method) {
      case ShapMethod::exact:
        e = shapley_exact(model, x);
        break;
      case ShapMethod::sampled:
        e = shapley_sampled(model, x, n_permutations, seed + 1 + rows[i]);
        break;
      case ShapMethod::path:
        e = treeinterpreter_path(model, x);
        break;
    }
    for (std::size_t f = 0; f < p; ++f) {
      report.mean_abs_phi[f] += std::abs(e.phi[f]);
      report.phi_values[f].push_back(e.phi[f]);
      report.feature_values[f].push_back(x[f]);
    }
  }
  for (double& v : report.mean_abs_phi) v /= static_cast<double>(rows.size());

  report.ordering.resize(static_cast<int>(p));
  std::iota(report.ordering.begin(), report.ordering.end(), 0);
  std::stable_sort(report.ordering.begin(), report.ordering.end(), [&](int a, int b) {
    return report.mean_abs_phi[static_cast<std::size_t>(a)] >
           report.mean_abs_phi[static_cast<std::size_t>(b)];
  });
  return report;
}

std::string shapley_to_json(const ShapleyExplanation& e,
                            const std::vector<std::string>& names,
                            const std::vector<double>& x) {
  nlohmann::json j;
  j["method"] = e.method == ShapMethod::exact    ? "exact"
                : e.method == ShapMethod::sampled ? "sampled"
                                                  : "path";
  j["link_space"] = "margin";  // phi and base_value are log-odds offsets
  j["base_value"] = e.base_value;
  j["margin_prediction"] = e.margin_prediction;
  j["probability_prediction"] = e.prob_prediction;
  j["adjustment"] = e.adjustment;
  nlohmann::json feats = nlohmann::json::array();
  for (std::size_t f = 0; f < e.phi.size(); ++f)
    feats.push_back({{"feature", names[f]},
                     {"value", x[f]},
                     {"phi", e.phi[f]},
                     {"present", static_cast<bool>(e.missing_mask[f])}});
  j["features"] = std::move(feats);
  return j.dump(2);
}

std::string summary_to_json(const SummaryReport& report,
                            const std::vector<std::string>& names) {
  nlohmann::json j;
  nlohmann::json order = nlohmann::json::array();
  for (int f : report.ordering)
    order.push_back({{"feature", names[static_cast<std::size_t>(f)]},
                     {"mean_abs_phi", report.mean_abs_phi[static_cast<std::size_t>(f)]}});
  j["ordering"] = std::move(order);
  j["rows_used"] = report.rows_used;
  nlohmann::json per = nlohmann::json::object();
  for (std::size_t f = 0; f < names.size(); ++f)
    per[names[f]] = {{"phi", report.phi_values[f]}, {"value", report.feature_values[f]}};
  j["per_feature"] = std::move(per);
  return j.dump(2);
}

}  // namespace explainkit
