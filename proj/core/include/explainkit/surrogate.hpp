#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "explainkit/data.hpp"
#include "explainkit/tree.hpp"

namespace explainkit {

struct Fidelity {
  double r2 = 0.0;
  double rmse = 0.0;
  double mape = 0.0;
  int mape_excluded = 0;  // rows skipped for |target| < 1e-6
  bool degenerate = false;  // zero-variance target; r2 reported as 1 by convention
};

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // population
};

struct CvReport {
  MetricStats r2;
  MetricStats rmse;
  MetricStats mape;
  int folds = 0;
};

// (parent feature, child feature, parent depth) for parent != child.
using InteractionPair = std::tuple<int, int, int>;

struct SurrogateReport {
  DecisionTree tree;
  Fidelity fidelity;
  CvReport cv;  // filled by cv_stability when requested
  std::vector<double> importance;  // gain-based, per feature
  std::vector<InteractionPair> interactions;
};

Fidelity fidelity_metrics(const std::vector<double>& predicted,
                          const std::vector<double>& target);

SurrogateReport extract_surrogate(const ScoreFn& score, const Dataset& data, int depth);

CvReport cv_stability(const ScoreFn& score, const Dataset& data, int depth, int folds,
                      std::uint64_t seed);

std::string export_dot(const DecisionTree& tree, const std::vector<std::string>& feature_names);

std::string surrogate_report_to_json(const SurrogateReport& report,
                                     const std::vector<std::string>& feature_names);

}  // namespace explainkit
