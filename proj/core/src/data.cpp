#include "explainkit/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace explainkit {

int signal_label(const std::vector<double>& row, double threshold) {
  const double s = row[0] * row[3] + std::abs(row[7]) * row[8] * row[8];
  return s >= threshold ? 1 : 0;
}

Dataset simulate_signal(const SimConfig& config) {
  if (config.n_rows < 1) throw std::invalid_argument("simulate_signal: n_rows must be >= 1");
  if (config.noise_fraction < 0.0 || config.noise_fraction > 1.0)
    throw std::invalid_argument("simulate_signal: noise_fraction must be in [0, 1]");

  const std::size_t n = config.n_rows;
  constexpr std::size_t kCols = 12;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  Dataset data;
  data.features.n_rows = n;
  data.features.cols.resize(kCols);
  for (std::size_t c = 0; c < kCols; ++c) {
    auto& col = data.features.cols[c];
    col.resize(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = unif(rng);
    data.feature_names.push_back("num" + std::to_string(c + 1));
  }

  data.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r)
    data.labels[r] = signal_label(data.features.row(r), config.threshold);

  const auto n_flip = static_cast<std::size_t>(std::llround(config.noise_fraction * static_cast<double>(n)));
  if (n_flip > 0) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < n_flip; ++i) data.labels[idx[i]] = 1 - data.labels[idx[i]];
  }
  return data;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col_name) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    while (pos < cell.size() && (cell[pos] == ' ' || cell[pos] == '\r')) ++pos;
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("load_csv: cannot parse cell at row " + std::to_string(row) +
                             ", column '" + col_name + "': '" + cell + "'");
  }
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target,
                 const std::optional<std::string>& id_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file '" + path + "'");
  auto header = split_line(strip_cr(line));
  for (auto& h : header) h = strip_cr(h);

  std::ptrdiff_t target_idx = -1, id_idx = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == target) target_idx = static_cast<std::ptrdiff_t>(c);
    if (id_column && header[c] == *id_column) id_idx = static_cast<std::ptrdiff_t>(c);
  }
  if (target_idx < 0)
    throw std::runtime_error("load_csv: target column '" + target + "' not found");

  Dataset data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) == target_idx || static_cast<std::ptrdiff_t>(c) == id_idx)
      continue;
    data.feature_names.push_back(header[c]);
  }
  data.features.cols.resize(data.feature_names.size());

  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("load_csv: row " + std::to_string(row + 1) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    std::size_t f = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == id_idx) continue;
      const double v = parse_cell(cells[c], row + 1, header[c]);
      if (static_cast<std::ptrdiff_t>(c) == target_idx) {
        if (v != 0.0 && v != 1.0)
          throw std::runtime_error("load_csv: target value at row " + std::to_string(row + 1) +
                                   " is not 0/1");
        data.labels.push_back(static_cast<int>(v));
      } else {
        data.features.cols[f++].push_back(v);
      }
    }
    ++row;
  }
  data.features.n_rows = row;
  return data;
}

void save_csv(const Dataset& data, const std::string& path, const std::string& label_name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open file '" + path + "'");
  out.precision(17);
  for (std::size_t c = 0; c < data.n_cols(); ++c) {
    if (c) out << ',';
    out << data.feature_names[c];
  }
  if (data.has_labels()) out << ',' << label_name;
  out << '\n';
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t c = 0; c < data.n_cols(); ++c) {
      if (c) out << ',';
      out << data.features(r, c);
    }
    if (data.has_labels()) out << ',' << data.labels[r];
    out << '\n';
  }
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.features.n_rows = rows.size();
  out.features.cols.resize(data.n_cols());
  for (std::size_t c = 0; c < data.n_cols(); ++c) {
    out.features.cols[c].reserve(rows.size());
    for (auto r : rows) out.features.cols[c].push_back(data.features(r, c));
  }
  if (data.has_labels()) {
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(data.labels[r]);
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, double validation_fraction,
                                  std::uint64_t seed) {
  if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
    throw std::invalid_argument("split: validation_fraction must be in (0, 1)");
  const std::size_t n = data.n_rows();
  const auto n_valid =
      static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));
  if (n_valid == 0 || n_valid == n)
    throw std::invalid_argument("split: degenerate partition (empty train or validation)");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<std::size_t> valid_rows(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_valid));
  std::vector<std::size_t> train_rows(idx.begin() + static_cast<std::ptrdiff_t>(n_valid), idx.end());
  std::sort(valid_rows.begin(), valid_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {take_rows(data, train_rows), take_rows(data, valid_rows)};
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson: vectors must have equal length >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::runtime_error("pearson: correlation undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

ColumnStats column_stats(const std::vector<double>& col,
                         const std::vector<double>& quantile_levels) {
  if (col.empty()) throw std::invalid_argument("column_stats: empty column");
  ColumnStats s;
  const double n = static_cast<double>(col.size());
  for (double v : col) s.mean += v;
  s.mean /= n;
  double ss = 0;
  for (double v : col) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);

  std::vector<double> sorted(col);
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  for (double level : quantile_levels) {
    const auto idx = static_cast<std::size_t>(
        std::floor(level * static_cast<double>(sorted.size() - 1)));
    s.quantiles.emplace_back(level, sorted[idx]);
  }
  return s;
}

std::vector<ColumnStats> column_stats(const Dataset& data,
                                      const std::vector<double>& quantile_levels) {
  std::vector<ColumnStats> out;
  out.reserve(data.n_cols());
  for (const auto& col : data.features.cols) out.push_back(column_stats(col, quantile_levels));
  return out;
}

}  // namespace explainkit
