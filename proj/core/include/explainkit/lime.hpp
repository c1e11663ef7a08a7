#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "explainkit/data.hpp"

namespace explainkit {

struct LimeConfig {
  int n_samples = 5000;
  double kernel_width = 0.0;  // <= 0 means the 0.75 * sqrt(P) default
  std::vector<double> lambda_grid = {1e0,  3e-1, 1e-1, 3e-2, 1e-2, 3e-3, 1e-3,
                                     3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6};
  int target_nonzero = 8;
  std::set<int> discretize;  // feature indices replaced by quantile-bin one-hots
  int bins_per_feature = 4;
  std::uint64_t seed = kDefaultSeed;
};

struct LimeExplanation {
  std::vector<double> contributions;  // per original feature
  double intercept = 0.0;
  double local_r2 = 0.0;
  double surrogate_prediction = 0.0;
  double model_prediction = 0.0;
  int nonzero_count = 0;
  double lambda_used = 0.0;
  std::uint64_t seed = 0;
};

// x plus zero-mean normal noise at each column's training std; zero-std
// columns stay pinned at x.
Matrix sample_locality(const std::vector<double>& x, const std::vector<ColumnStats>& stats,
                       int n, std::uint64_t seed);

// exp(-d^2 / width^2) on per-column standardized coordinates.
std::vector<double> kernel_weights(const std::vector<double>& x, const Matrix& samples,
                                   double width, const std::vector<ColumnStats>& stats);

struct LassoFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

// Weighted LASSO by cyclic coordinate descent with soft thresholding.
// Objective: (1/2W) sum w_i (y_i - b0 - b.z_i)^2 + lambda * sum |b_j| with the
// penalty applied on internally standardized columns; intercept unpenalized.
LassoFit fit_lasso(const Matrix& design, const std::vector<double>& targets,
                   const std::vector<double>& weights, double lambda);

LimeExplanation explain_lime(const ScoreFn& score, const std::vector<double>& x,
                             const Dataset& data, const LimeConfig& config);

std::vector<double> lime_cv_std(const ScoreFn& score, const std::vector<double>& x,
                                const Dataset& data, const LimeConfig& config, int repeats);

std::string lime_to_json(const LimeExplanation& e, const std::vector<std::string>& names,
                         const std::vector<double>& x, const LimeConfig& config);

}  // namespace explainkit
