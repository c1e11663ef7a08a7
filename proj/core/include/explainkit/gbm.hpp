#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "explainkit/data.hpp"
#include "explainkit/tree.hpp"

namespace explainkit {

struct GbmConfig {
  double learning_rate = 0.08;
  double subsample = 0.9;
  double colsample = 0.9;
  int max_depth = 5;
  int max_rounds = 1000;
  int early_stopping_rounds = 50;
  int min_samples_leaf = 5;
  std::uint64_t seed = kDefaultSeed;
};

// Additive tree ensemble under a logistic link.
// prediction = logistic(base_score + learning_rate * sum of tree outputs
// over trees[0..best_round)).
struct GbmModel {
  std::vector<DecisionTree> trees;
  double learning_rate = 0.0;
  double base_score = 0.0;               // log-odds of the training mean
  std::vector<int> constraints;          // -1/0/+1 per feature
  int best_round = 0;                    // number of trees in the selected model
  std::vector<std::string> feature_names;
  double best_validation_auc = 0.0;
  int trained_rounds = 0;

  std::size_t feature_count() const { return feature_names.size(); }
  double margin(const std::vector<double>& row) const;
  double predict_row(const std::vector<double>& row) const;
  ScoreFn score_fn() const;
};

GbmModel fit_gbm(const Dataset& train, const Dataset& valid, const GbmConfig& config,
                 const std::vector<int>& constraints = {});

std::vector<double> predict(const GbmModel& model, const Matrix& rows);

// Mann-Whitney rank AUC, ties counted 0.5.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

double log_loss(const std::vector<double>& probs, const std::vector<int>& labels);

std::string model_to_json(const GbmModel& model);
GbmModel model_from_json(const std::string& text);
void save_model(const GbmModel& model, const std::string& path);
GbmModel load_model(const std::string& path);

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace explainkit
