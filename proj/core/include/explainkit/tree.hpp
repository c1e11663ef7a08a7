#pragma once

#include <limits>
#include <vector>

#include "explainkit/data.hpp"

namespace explainkit {

// Flat node storage; root at index 0. Internal nodes carry a split,
// leaves carry a value. Split rule: x[split_feature] < threshold goes left.
struct TreeNode {
  int split_feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;
  double cover = 0.0;  // training rows reaching this node
  double gain = 0.0;   // weighted SSE reduction of the split (0 on leaves)

  bool is_leaf() const { return left < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int max_depth = 0;  // configured bound; actual depth <= max_depth
  int feature_count = 0;

  const TreeNode& root() const { return nodes[0]; }
};

struct TreeConfig {
  int max_depth = 5;
  int min_samples_leaf = 5;
};

struct ValueBounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Greedy variance-reduction regression tree on weighted squared error.
// `constraints` holds -1/0/+1 per feature (empty means unconstrained); a split
// violating the declared leaf-value order is rejected and child value bounds
// are propagated through the split midpoint.
DecisionTree fit_tree(const Matrix& features, const std::vector<double>& targets,
                      const std::vector<double>& row_weights, const TreeConfig& config,
                      const std::vector<int>& constraints = {},
                      ValueBounds bounds = {});

// As above, restricted to a row subset and an allowed-feature subset.
DecisionTree fit_tree(const Matrix& features, const std::vector<double>& targets,
                      const std::vector<double>& row_weights,
                      const std::vector<std::size_t>& rows,
                      const std::vector<int>& allowed_features, const TreeConfig& config,
                      const std::vector<int>& constraints, ValueBounds bounds);

double predict_tree(const DecisionTree& tree, const std::vector<double>& row);

// Actual depth of the fitted tree (0 for a single leaf).
int tree_depth(const DecisionTree& tree);

}  // namespace explainkit
