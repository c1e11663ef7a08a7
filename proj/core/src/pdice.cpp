#include "explainkit/pdice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace explainkit {

std::vector<double> make_grid(const std::vector<double>& col, int max_points) {
  if (col.empty()) throw std::invalid_argument("make_grid: empty column");
  if (max_points < 2) throw std::invalid_argument("make_grid: max_points must be >= 2");

  std::vector<double> sorted(col);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct(sorted);
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() <= static_cast<std::size_t>(max_points)) return distinct;

  std::vector<double> grid;
  for (int k = 0; k < max_points; ++k) {
    const double level = static_cast<double>(k) / (max_points - 1);
    const auto idx = static_cast<std::size_t>(
        std::floor(level * static_cast<double>(sorted.size() - 1)));
    grid.push_back(sorted[idx]);
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> partial_dependence(const ScoreFn& score, const Dataset& data, int feature,
                                       const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("partial_dependence: empty grid");
  Matrix work = data.features;
  std::vector<double> pd;
  pd.reserve(grid.size());
  for (double v : grid) {
    std::fill(work.cols[static_cast<std::size_t>(feature)].begin(),
              work.cols[static_cast<std::size_t>(feature)].end(), v);
    const auto scores = score(work);
    double mean = 0;
    for (double s : scores) mean += s;
    pd.push_back(mean / static_cast<double>(scores.size()));
  }
  return pd;
}

std::vector<std::vector<double>> ice(const ScoreFn& score, const Dataset& data, int feature,
                                     const std::vector<double>& grid,
                                     const std::vector<std::size_t>& instance_ids) {
  Matrix work;
  work.n_rows = instance_ids.size();
  work.cols.resize(data.n_cols());
  for (std::size_t c = 0; c < data.n_cols(); ++c) {
    work.cols[c].reserve(instance_ids.size());
    for (auto r : instance_ids) work.cols[c].push_back(data.features(r, c));
  }

  std::vector<std::vector<double>> curves(instance_ids.size(),
                                          std::vector<double>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::fill(work.cols[static_cast<std::size_t>(feature)].begin(),
              work.cols[static_cast<std::size_t>(feature)].end(), grid[k]);
    const auto scores = score(work);
    for (std::size_t i = 0; i < instance_ids.size(); ++i) curves[i][k] = scores[i];
  }
  return curves;
}

std::vector<std::size_t> decile_instances(const ScoreFn& score, const Dataset& data) {
  if (data.n_rows() == 0) throw std::invalid_argument("decile_instances: empty data");
  const auto scores = score(data.features);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::vector<std::size_t> out;
  for (int k = 0; k <= 10; ++k) {
    const double level = static_cast<double>(k) / 10.0;
    const auto idx = static_cast<std::size_t>(
        std::floor(level * static_cast<double>(order.size() - 1)));
    const std::size_t row = order[idx];
    if (std::find(out.begin(), out.end(), row) == out.end()) out.push_back(row);
  }
  return out;
}

std::vector<std::vector<double>> pd2(const ScoreFn& score, const Dataset& data, int feature_a,
                                     int feature_b, const std::vector<double>& grid_a,
                                     const std::vector<double>& grid_b) {
  if (feature_a == feature_b) throw std::invalid_argument("pd2: features must be distinct");
  Matrix work = data.features;
  std::vector<std::vector<double>> out(grid_a.size(), std::vector<double>(grid_b.size()));
  for (std::size_t p = 0; p < grid_a.size(); ++p) {
    std::fill(work.cols[static_cast<std::size_t>(feature_a)].begin(),
              work.cols[static_cast<std::size_t>(feature_a)].end(), grid_a[p]);
    for (std::size_t q = 0; q < grid_b.size(); ++q) {
      std::fill(work.cols[static_cast<std::size_t>(feature_b)].begin(),
                work.cols[static_cast<std::size_t>(feature_b)].end(), grid_b[q]);
      const auto scores = score(work);
      double mean = 0;
      for (double s : scores) mean += s;
      out[p][q] = mean / static_cast<double>(scores.size());
    }
  }
  return out;
}

std::vector<double> pd_ice_divergence(const PdIceResult& result) {
  if (result.ice.empty()) throw std::invalid_argument("pd_ice_divergence: empty ICE");
  const std::size_t g = result.grid.size();
  std::vector<std::vector<double>> centered(result.ice);
  for (auto& curve : centered) {
    double mean = 0;
    for (double v : curve) mean += v;
    mean /= static_cast<double>(curve.size());
    for (double& v : curve) v -= mean;
  }
  std::vector<double> out(g, 0.0);
  for (std::size_t k = 0; k < g; ++k) {
    double mean = 0;
    for (const auto& curve : centered) mean += curve[k];
    mean /= static_cast<double>(centered.size());
    double ss = 0;
    for (const auto& curve : centered) ss += (curve[k] - mean) * (curve[k] - mean);
    out[k] = std::sqrt(ss / static_cast<double>(centered.size()));
  }
  return out;
}

Histogram histogram10(const std::vector<double>& col) {
  if (col.empty()) throw std::invalid_argument("histogram10: empty column");
  const auto [mn_it, mx_it] = std::minmax_element(col.begin(), col.end());
  const double mn = *mn_it, mx = *mx_it;
  constexpr int bins = 10;
  Histogram h;
  h.counts.assign(bins, 0);
  const double width = (mx - mn) / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(mn + b * width);
  for (double v : col) {
    int b = width > 0 ? static_cast<int>((v - mn) / width) : 0;
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

PdIceResult compute_pdice(const ScoreFn& score, const Dataset& data, int feature,
                          int max_grid_points) {
  PdIceResult result;
  result.feature = feature;
  result.grid = make_grid(data.features.cols[static_cast<std::size_t>(feature)],
                          std::max(max_grid_points, 2));
  result.constant_grid = result.grid.size() == 1;
  result.pd = partial_dependence(score, data, feature, result.grid);
  result.instance_ids = decile_instances(score, data);
  result.ice = ice(score, data, feature, result.grid, result.instance_ids);
  result.divergence = pd_ice_divergence(result);
  result.histogram = histogram10(data.features.cols[static_cast<std::size_t>(feature)]);
  return result;
}

std::string pdice_to_json(const PdIceResult& result, const std::string& feature_name) {
  nlohmann::json j;
  j["feature"] = feature_name;
  j["grid"] = result.grid;
  j["pd"] = result.pd;
  j["instance_ids"] = result.instance_ids;
  j["ice"] = result.ice;
  j["divergence"] = result.divergence;
  j["constant_grid"] = result.constant_grid;
  j["histogram"] = {{"edges", result.histogram.edges}, {"counts", result.histogram.counts}};
  return j.dump(2);
}

std::string pdice_to_csv(const PdIceResult& result, const std::string& feature_name) {
  std::ostringstream out;
  out.precision(17);
  out << "feature,grid_value,series_id,value\n";
  for (std::size_t k = 0; k < result.grid.size(); ++k)
    out << feature_name << ',' << result.grid[k] << ",pd," << result.pd[k] << '\n';
  for (std::size_t i = 0; i < result.ice.size(); ++i)
    for (std::size_t k = 0; k < result.grid.size(); ++k)
      out << feature_name << ',' << result.grid[k] << ",ice_" << result.instance_ids[i] << ','
          << result.ice[i][k] << '\n';
  for (std::size_t k = 0; k < result.grid.size(); ++k)
    out << feature_name << ',' << result.grid[k] << ",divergence," << result.divergence[k]
        << '\n';
  return out.str();
}

}  // namespace explainkit
