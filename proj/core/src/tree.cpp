#include "explainkit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace explainkit {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double left_mean = 0.0;
  double right_mean = 0.0;
};

struct Builder {
  const Matrix& X;
  const std::vector<double>& t;
  const std::vector<double>& w;
  const std::vector<int>& allowed;
  const TreeConfig& cfg;
  const std::vector<int>& constraints;
  std::vector<TreeNode> nodes;

  int constraint_of(int f) const {
    return constraints.empty() ? 0 : constraints[static_cast<std::size_t>(f)];
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows, double lo, double hi) const {
    SplitChoice best;
    double sw = 0, swt = 0;
    for (auto r : rows) {
      sw += w[r];
      swt += w[r] * t[r];
    }
    if (sw <= 0) return best;
    const double parent_score = swt * swt / sw;

    std::vector<std::pair<double, std::size_t>> order(rows.size());
    for (int f : allowed) {
      const auto& col = X.cols[static_cast<std::size_t>(f)];
      for (std::size_t i = 0; i < rows.size(); ++i) order[i] = {col[rows[i]], rows[i]};
      std::sort(order.begin(), order.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double lw = 0, lwt = 0;
      std::size_t lcount = 0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto r = order[i].second;
        lw += w[r];
        lwt += w[r] * t[r];
        ++lcount;
        if (order[i].first == order[i + 1].first) continue;  // no gap to split in
        const std::size_t rcount = order.size() - lcount;
        if (lcount < static_cast<std::size_t>(cfg.min_samples_leaf) ||
            rcount < static_cast<std::size_t>(cfg.min_samples_leaf))
          continue;
        const double rw = sw - lw, rwt = swt - lwt;
        if (lw <= 0 || rw <= 0) continue;
        const double gain = lwt * lwt / lw + rwt * rwt / rw - parent_score;
        if (gain <= best.gain + kMinGain && best.found) continue;
        if (gain <= kMinGain) continue;

        const double ml = std::clamp(lwt / lw, lo, hi);
        const double mr = std::clamp(rwt / rw, lo, hi);
        const int dir = constraint_of(f);
        if ((dir > 0 && ml > mr) || (dir < 0 && ml < mr)) continue;

        best.found = true;
        best.feature = f;
        best.threshold = 0.5 * (order[i].first + order[i + 1].first);
        best.gain = gain;
        best.left_mean = ml;
        best.right_mean = mr;
      }
    }
    return best;
  }

  int build(const std::vector<std::size_t>& rows, int depth, double lo, double hi) {
    double sw = 0, swt = 0;
    for (auto r : rows) {
      sw += w[r];
      swt += w[r] * t[r];
    }
    const double mean = sw > 0 ? swt / sw : 0.0;

    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[static_cast<std::size_t>(idx)].cover = static_cast<double>(rows.size());
    nodes[static_cast<std::size_t>(idx)].leaf_value = std::clamp(mean, lo, hi);

    if (depth >= cfg.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(cfg.min_samples_leaf))
      return idx;

    const SplitChoice s = best_split(rows, lo, hi);
    if (!s.found) return idx;

    std::vector<std::size_t> lrows, rrows;
    lrows.reserve(rows.size());
    const auto& col = X.cols[static_cast<std::size_t>(s.feature)];
    for (auto r : rows) (col[r] < s.threshold ? lrows : rrows).push_back(r);

    double llo = lo, lhi = hi, rlo = lo, rhi = hi;
    const int dir = constraint_of(s.feature);
    if (dir != 0) {
      const double mid = 0.5 * (s.left_mean + s.right_mean);
      if (dir > 0) {
        lhi = std::min(lhi, mid);
        rlo = std::max(rlo, mid);
      } else {
        llo = std::max(llo, mid);
        rhi = std::min(rhi, mid);
      }
    }

    const int l = build(lrows, depth + 1, llo, lhi);
    const int r = build(rrows, depth + 1, rlo, rhi);
    auto& node = nodes[static_cast<std::size_t>(idx)];
    node.split_feature = s.feature;
    node.threshold = s.threshold;
    node.gain = s.gain;
    node.left = l;
    node.right = r;
    return idx;
  }
};

}  // namespace

DecisionTree fit_tree(const Matrix& features, const std::vector<double>& targets,
                      const std::vector<double>& row_weights,
                      const std::vector<std::size_t>& rows,
                      const std::vector<int>& allowed_features, const TreeConfig& config,
                      const std::vector<int>& constraints, ValueBounds bounds) {
  if (rows.empty()) throw std::invalid_argument("fit_tree: empty input");
  if (targets.size() != features.n_rows || row_weights.size() != features.n_rows)
    throw std::invalid_argument("fit_tree: inconsistent lengths");
  for (auto r : rows)
    if (!std::isfinite(targets[r])) throw std::invalid_argument("fit_tree: non-finite target");

  Builder b{features, targets, row_weights, allowed_features, config, constraints, {}};
  b.build(rows, 0, bounds.lo, bounds.hi);

  DecisionTree tree;
  tree.nodes = std::move(b.nodes);
  tree.max_depth = config.max_depth;
  tree.feature_count = static_cast<int>(features.n_cols());
  return tree;
}

DecisionTree fit_tree(const Matrix& features, const std::vector<double>& targets,
                      const std::vector<double>& row_weights, const TreeConfig& config,
                      const std::vector<int>& constraints, ValueBounds bounds) {
  std::vector<std::size_t> rows(features.n_rows);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<int> all_features(features.n_cols());
  std::iota(all_features.begin(), all_features.end(), 0);
  return fit_tree(features, targets, row_weights, rows, all_features, config, constraints,
                  bounds);
}

double predict_tree(const DecisionTree& tree, const std::vector<double>& row) {
  const TreeNode* node = &tree.nodes[0];
  while (!node->is_leaf()) {
    const int next = row[static_cast<std::size_t>(node->split_feature)] < node->threshold
                         ? node->left
                         : node->right;
    node = &tree.nodes[static_cast<std::size_t>(next)];
  }
  return node->leaf_value;
}

namespace {
int depth_of(const DecisionTree& tree, int idx) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_of(tree, n.left), depth_of(tree, n.right));
}
}  // namespace

int tree_depth(const DecisionTree& tree) { return depth_of(tree, 0); }

}  // namespace explainkit
