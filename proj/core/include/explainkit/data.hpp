#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace explainkit {

// Column-major feature matrix. Every column has the same length.
struct Matrix {
  std::vector<std::vector<double>> cols;
  std::size_t n_rows = 0;

  std::size_t n_cols() const { return cols.size(); }
  double operator()(std::size_t r, std::size_t c) const { return cols[c][r]; }
  double& at(std::size_t r, std::size_t c) { return cols[c][r]; }

  std::vector<double> row(std::size_t r) const {
    std::vector<double> out(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) out[c] = cols[c][r];
    return out;
  }

  static Matrix zeros(std::size_t rows, std::size_t columns) {
    Matrix m;
    m.n_rows = rows;
    m.cols.assign(columns, std::vector<double>(rows, 0.0));
    return m;
  }
};

// Generic scoring contract: rows in, one score per row out.
// Deterministic and row-order preserving; every explainer consumes this.
using ScoreFn = std::function<std::vector<double>(const Matrix&)>;

struct Dataset {
  Matrix features;
  std::vector<std::string> feature_names;
  std::vector<int> labels;  // empty when the dataset is unlabeled

  std::size_t n_rows() const { return features.n_rows; }
  std::size_t n_cols() const { return features.n_cols(); }
  bool has_labels() const { return !labels.empty(); }
};

struct SimConfig {
  std::size_t n_rows = 1000;
  std::uint64_t seed = 12345;
  double noise_fraction = 0.15;
  double threshold = 0.42;
};

struct ColumnStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (level, value)
};

inline constexpr std::uint64_t kDefaultSeed = 12345;

// Simulated binary signal: four interacting features, eight noise features,
// a fixed fraction of labels flipped.
Dataset simulate_signal(const SimConfig& config);

// Clean (noise-free) label for one row of the simulator's feature layout.
int signal_label(const std::vector<double>& row, double threshold);

Dataset load_csv(const std::string& path, const std::string& target,
                 const std::optional<std::string>& id_column = std::nullopt);

void save_csv(const Dataset& data, const std::string& path,
              const std::string& label_name = "label");

// Random row partition; validation gets round(fraction * n) rows.
std::pair<Dataset, Dataset> split(const Dataset& data, double validation_fraction,
                                  std::uint64_t seed);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Exact order statistics; quantile at index floor(level * (n - 1)).
ColumnStats column_stats(const std::vector<double>& col,
                         const std::vector<double>& quantile_levels);
std::vector<ColumnStats> column_stats(const Dataset& data,
                                      const std::vector<double>& quantile_levels);

}  // namespace explainkit
