#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "explainkit/data.hpp"
#include "explainkit/gbm.hpp"
#include "explainkit/tree.hpp"

namespace explainkit {

enum class ShapMethod { exact, sampled, path };

// Marginalization behind g_x(S): cover-weighted path descent through the
// tree's own training distribution, or interventional averaging over a
// reference sample.
enum class Marginalization { cover_weighted, interventional };

struct ShapleyExplanation {
  std::vector<double> phi;        // margin-space attributions
  double base_value = 0.0;        // g_x(empty set), margin space
  double margin_prediction = 0.0;
  double prob_prediction = 0.0;
  std::vector<bool> missing_mask;  // false = missing (phi forced to 0)
  ShapMethod method = ShapMethod::exact;
  double adjustment = 0.0;  // magnitude of the sampled-method additivity fixup
};

struct SummaryReport {
  std::vector<double> mean_abs_phi;                 // per feature
  std::vector<std::vector<double>> phi_values;      // feature x row
  std::vector<std::vector<double>> feature_values;  // feature x row
  std::vector<int> ordering;  // features sorted by descending mean |phi|
  std::vector<std::size_t> rows_used;
};

// Expected leaf value with only the `present` features fixed at x; splits on
// absent features average both children by cover.
double tree_expectation(const DecisionTree& tree, const std::vector<double>& x,
                        const std::vector<bool>& present);

double tree_expectation(const DecisionTree& tree, const std::vector<double>& x,
                        const std::vector<bool>& present, Marginalization marg,
                        const Matrix* reference);

ShapleyExplanation shapley_exact(const GbmModel& model, const std::vector<double>& x,
                                 Marginalization marg = Marginalization::cover_weighted,
                                 const Matrix* reference = nullptr);

ShapleyExplanation shapley_sampled(const GbmModel& model, const std::vector<double>& x,
                                   int n_permutations, std::uint64_t seed,
                                   Marginalization marg = Marginalization::cover_weighted,
                                   const Matrix* reference = nullptr);

// Averages marginal contributions over every permutation of the features
// (feature count <= 8); the estimator's zero-variance limit.
ShapleyExplanation shapley_exhaustive_permutations(const GbmModel& model,
                                                   const std::vector<double>& x);

// Saabas-style decision-path attribution; locally accurate per tree but
// inconsistent in general.
ShapleyExplanation treeinterpreter_path(const GbmModel& model, const std::vector<double>& x);

SummaryReport summarize(const GbmModel& model, const Dataset& data, ShapMethod method,
                        std::size_t budget, std::uint64_t seed = kDefaultSeed,
                        int n_permutations = 32);

std::string shapley_to_json(const ShapleyExplanation& e,
                            const std::vector<std::string>& names,
                            const std::vector<double>& x);
std::string summary_to_json(const SummaryReport& report,
                            const std::vector<std::string>& names);

}  // namespace explainkit
