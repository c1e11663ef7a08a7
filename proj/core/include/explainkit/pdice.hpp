#pragma once

#include <string>
#include <vector>

#include "explainkit/data.hpp"

namespace explainkit {

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<int> counts;
};

struct PdIceResult {
  int feature = -1;
  std::vector<double> grid;
  std::vector<double> pd;
  std::vector<std::vector<double>> ice;  // instances x grid
  std::vector<std::size_t> instance_ids;
  std::vector<double> divergence;  // per grid point
  Histogram histogram;
  bool constant_grid = false;
};

// Sorted distinct values when few enough, otherwise equally spaced quantiles.
std::vector<double> make_grid(const std::vector<double>& col, int max_points);

std::vector<double> partial_dependence(const ScoreFn& score, const Dataset& data, int feature,
                                       const std::vector<double>& grid);

std::vector<std::vector<double>> ice(const ScoreFn& score, const Dataset& data, int feature,
                                     const std::vector<double>& grid,
                                     const std::vector<std::size_t>& instance_ids);

// Rows nearest the min, each decile, and the max of the score distribution.
std::vector<std::size_t> decile_instances(const ScoreFn& score, const Dataset& data);

std::vector<std::vector<double>> pd2(const ScoreFn& score, const Dataset& data, int feature_a,
                                     int feature_b, const std::vector<double>& grid_a,
                                     const std::vector<double>& grid_b);

// Per grid point std of mean-centered ICE curves; flags interactions that
// partial dependence averages away.
std::vector<double> pd_ice_divergence(const PdIceResult& result);

Histogram histogram10(const std::vector<double>& col);

// Full PD + decile ICE + divergence + histogram bundle for one feature.
PdIceResult compute_pdice(const ScoreFn& score, const Dataset& data, int feature,
                          int max_grid_points = 20);

std::string pdice_to_json(const PdIceResult& result, const std::string& feature_name);
std::string pdice_to_csv(const PdIceResult& result, const std::string& feature_name);

}  // namespace explainkit
