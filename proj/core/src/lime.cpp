#include "explainkit/lime.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace explainkit {

Matrix sample_locality(const std::vector<double>& x, const std::vector<ColumnStats>& stats,
                       int n, std::uint64_t seed) {
  if (stats.size() != x.size())
    throw std::invalid_argument("sample_locality: stats must cover every column");
  Matrix m;
  m.n_rows = static_cast<std::size_t>(n);
  m.cols.resize(x.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t c = 0; c < x.size(); ++c) {
    auto& col = m.cols[c];
    col.resize(static_cast<std::size_t>(n));
    if (stats[c].std == 0.0) {
      std::fill(col.begin(), col.end(), x[c]);
      continue;
    }
    for (auto& v : col) v = x[c] + stats[c].std * normal(rng);
  }
  return m;
}

std::vector<double> kernel_weights(const std::vector<double>& x, const Matrix& samples,
                                   double width, const std::vector<ColumnStats>& stats) {
  if (width <= 0) throw std::invalid_argument("kernel_weights: width must be positive");
  std::vector<double> w(samples.n_rows);
  for (std::size_t i = 0; i < samples.n_rows; ++i) {
    double d2 = 0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      if (stats[c].std == 0.0) continue;
      const double d = (samples(i, c) - x[c]) / stats[c].std;
      d2 += d * d;
    }
    w[i] = std::exp(-d2 / (width * width));
  }
  return w;
}

LassoFit fit_lasso(const Matrix& design, const std::vector<double>& targets,
                   const std::vector<double>& weights, double lambda) {
  if (lambda < 0) throw std::invalid_argument("fit_lasso: lambda must be >= 0");
  const std::size_t n = design.n_rows;
  const std::size_t p = design.n_cols();
  if (targets.size() != n || weights.size() != n || n == 0)
    throw std::invalid_argument("fit_lasso: inconsistent input");

  double wsum = 0;
  for (double w : weights) wsum += w;
  if (wsum <= 0) throw std::invalid_argument("fit_lasso: weights sum to zero");
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = weights[i] / wsum;

  // weighted standardization; zero-variance columns are frozen at coefficient 0
  std::vector<double> mean(p, 0.0), scale(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += u[i] * design(i, j);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = design(i, j) - mean[j];
      ss += u[i] * d * d;
    }
    scale[j] = std::sqrt(ss);
  }
  double ybar = 0;
  for (std::size_t i = 0; i < n; ++i) ybar += u[i] * targets[i];

  std::vector<std::vector<double>> zs(p, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < p; ++j) {
    if (scale[j] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) zs[j][i] = (design(i, j) - mean[j]) / scale[j];
  }

  std::vector<double> beta(p, 0.0);
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = targets[i] - ybar;

  constexpr int kMaxSweeps = 10000;
  constexpr double kTol = 1e-7;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double max_change = 0;
    for (std::size_t j = 0; j < p; ++j) {
      if (scale[j] == 0.0) continue;
      double rho = 0;
      for (std::size_t i = 0; i < n; ++i) rho += u[i] * zs[j][i] * resid[i];
      rho += beta[j];  // sum u * zs^2 == 1 by standardization
      const double next =
          std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho);
      const double delta = next - beta[j];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i) resid[i] -= delta * zs[j][i];
        beta[j] = next;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    converged = max_change < kTol;
  }
  if (!converged)
    throw std::runtime_error("fit_lasso: coordinate descent did not converge in 10000 sweeps");

  LassoFit fit;
  fit.coefficients.assign(p, 0.0);
  fit.intercept = ybar;
  for (std::size_t j = 0; j < p; ++j) {
    if (scale[j] == 0.0) continue;
    fit.coefficients[j] = beta[j] / scale[j];
    fit.intercept -= fit.coefficients[j] * mean[j];
  }
  return fit;
}

namespace {

struct DesignSpec {
  // per original feature: either one raw column or bins one-hot columns
  std::vector<int> first_col;        // design column index of the feature
  std::vector<int> width;            // 1 for raw, bins for discretized
  std::vector<std::vector<double>> thresholds;  // bin edges per discretized feature
  std::size_t total_cols = 0;
};

DesignSpec plan_design(std::size_t p, const LimeConfig& config,
                       const std::vector<ColumnStats>& stats) {
  DesignSpec spec;
  spec.first_col.resize(p);
  spec.width.resize(p);
  spec.thresholds.resize(p);
  int col = 0;
  for (std::size_t j = 0; j < p; ++j) {
    spec.first_col[j] = col;
    if (config.discretize.count(static_cast<int>(j))) {
      spec.width[j] = config.bins_per_feature;
      for (int k = 1; k < config.bins_per_feature; ++k)
        spec.thresholds[j].push_back(
            stats[j].quantiles[static_cast<std::size_t>(k - 1)].second);
      col += config.bins_per_feature;
    } else {
      spec.width[j] = 1;
      col += 1;
    }
  }
  spec.total_cols = static_cast<std::size_t>(col);
  return spec;
}

int bin_of(double v, const std::vector<double>& thresholds) {
  int b = 0;
  for (double t : thresholds)
    if (v >= t) ++b;
  return b;
}

Matrix build_design(const Matrix& samples, const DesignSpec& spec) {
  Matrix d = Matrix::zeros(samples.n_rows, spec.total_cols);
  for (std::size_t j = 0; j < spec.first_col.size(); ++j) {
    if (spec.width[j] == 1) {
      d.cols[static_cast<std::size_t>(spec.first_col[j])] = samples.cols[j];
    } else {
      for (std::size_t i = 0; i < samples.n_rows; ++i) {
        const int b = bin_of(samples(i, j), spec.thresholds[j]);
        d.at(i, static_cast<std::size_t>(spec.first_col[j] + b)) = 1.0;
      }
    }
  }
  return d;
}

std::vector<double> design_row(const std::vector<double>& x, const DesignSpec& spec) {
  std::vector<double> row(spec.total_cols, 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (spec.width[j] == 1) {
      row[static_cast<std::size_t>(spec.first_col[j])] = x[j];
    } else {
      row[static_cast<std::size_t>(spec.first_col[j] + bin_of(x[j], spec.thresholds[j]))] = 1.0;
    }
  }
  return row;
}

std::vector<double> feature_contributions(const LassoFit& fit, const std::vector<double>& xrow,
                                          const DesignSpec& spec) {
  std::vector<double> contrib(spec.first_col.size(), 0.0);
  for (std::size_t j = 0; j < contrib.size(); ++j)
    for (int k = 0; k < spec.width[j]; ++k) {
      const auto c = static_cast<std::size_t>(spec.first_col[j] + k);
      contrib[j] += fit.coefficients[c] * xrow[c];
    }
  return contrib;
}

}  // namespace

LimeExplanation explain_lime(const ScoreFn& score, const std::vector<double>& x,
                             const Dataset& data, const LimeConfig& config) {
  const std::size_t p = data.n_cols();
  if (config.n_samples < 10 * static_cast<int>(p))
    throw std::invalid_argument("explain_lime: n_samples must be >= 10 * feature count");
  if (config.lambda_grid.empty())
    throw std::invalid_argument("explain_lime: empty lambda grid");

  std::vector<double> levels;
  for (int k = 1; k < config.bins_per_feature; ++k)
    levels.push_back(static_cast<double>(k) / config.bins_per_feature);
  const auto stats = column_stats(data, levels);

  const double width =
      config.kernel_width > 0 ? config.kernel_width : 0.75 * std::sqrt(static_cast<double>(p));

  const Matrix samples = sample_locality(x, stats, config.n_samples, config.seed);
  const std::vector<double> w = kernel_weights(x, samples, width, stats);
  const std::vector<double> y = score(samples);

  const DesignSpec spec = plan_design(p, config, stats);
  const Matrix design = build_design(samples, spec);

  bool any_varying = false;
  for (const auto& col : design.cols) {
    for (std::size_t i = 1; i < col.size(); ++i)
      if (col[i] != col[0]) {
        any_varying = true;
        break;
      }
    if (any_varying) break;
  }
  if (!any_varying) throw std::runtime_error("explain_lime: degenerate design (all constant)");

  const std::vector<double> xrow = design_row(x, spec);

  // lambda path, descending; keep the smallest lambda still meeting the
  // sparsity target, otherwise fall back to the smallest lambda
  std::vector<double> grid = config.lambda_grid;
  LassoFit chosen_fit;
  double chosen_lambda = -1.0;
  LassoFit last_fit;
  for (double lambda : grid) {
    last_fit = fit_lasso(design, y, w, lambda);
    const auto contrib = feature_contributions(last_fit, xrow, spec);
    int nonzero = 0;
    for (double c : contrib)
      if (c != 0.0) ++nonzero;
    if (nonzero <= config.target_nonzero) {
      chosen_fit = last_fit;
      chosen_lambda = lambda;
    }
  }
  if (chosen_lambda < 0) {
    chosen_fit = last_fit;
    chosen_lambda = grid.back();
  }

  LimeExplanation e;
  e.seed = config.seed;
  e.lambda_used = chosen_lambda;
  e.intercept = chosen_fit.intercept;
  e.contributions = feature_contributions(chosen_fit, xrow, spec);
  for (double c : e.contributions)
    if (c != 0.0) ++e.nonzero_count;
  e.surrogate_prediction = e.intercept;
  for (double c : e.contributions) e.surrogate_prediction += c;

  {
    Matrix one;
    one.n_rows = 1;
    one.cols.resize(p);
    for (std::size_t c = 0; c < p; ++c) one.cols[c] = {x[c]};
    e.model_prediction = score(one)[0];
  }

  // weighted R^2 of the chosen fit over the locality samples
  double wsum = 0, ybar = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    wsum += w[i];
    ybar += w[i] * y[i];
  }
  ybar /= wsum;
  double sse = 0, sst = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double pred = chosen_fit.intercept;
    for (std::size_t c = 0; c < spec.total_cols; ++c)
      pred += chosen_fit.coefficients[c] * design(i, c);
    sse += w[i] * (y[i] - pred) * (y[i] - pred);
    sst += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  e.local_r2 = sst > 0 ? 1.0 - sse / sst : 1.0;
  return e;
}

std::vector<double> lime_cv_std(const ScoreFn& score, const std::vector<double>& x,
                                const Dataset& data, const LimeConfig& config, int repeats) {
  if (repeats < 2) throw std::invalid_argument("lime_cv_std: repeats must be >= 2");
  std::vector<std::vector<double>> runs;
  for (int r = 0; r < repeats; ++r) {
    LimeConfig cfg = config;
    cfg.seed = config.seed + static_cast<std::uint64_t>(r);
    runs.push_back(explain_lime(score, x, data, cfg).contributions);
  }
  std::vector<double> out(data.n_cols(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double mean = 0;
    for (const auto& run : runs) mean += run[j];
    mean /= repeats;
    double ss = 0;
    for (const auto& run : runs) ss += (run[j] - mean) * (run[j] - mean);
    out[j] = std::sqrt(ss / repeats);
  }
  return out;
}

std::string lime_to_json(const LimeExplanation& e, const std::vector<std::string>& names,
                         const std::vector<double>& x, const LimeConfig& config) {
  nlohmann::json j;
  j["intercept"] = e.intercept;
  j["local_r2"] = e.local_r2;
  j["surrogate_prediction"] = e.surrogate_prediction;
  j["model_prediction"] = e.model_prediction;
  j["nonzero_count"] = e.nonzero_count;
  j["lambda_used"] = e.lambda_used;
  nlohmann::json contrib = nlohmann::json::array();
  for (std::size_t f = 0; f < e.contributions.size(); ++f)
    contrib.push_back(
        {{"feature", names[f]}, {"value", x[f]}, {"contribution", e.contributions[f]}});
  j["contributions"] = std::move(contrib);
  j["config"] = {{"n_samples", config.n_samples},
                 {"kernel_width", config.kernel_width},
                 {"target_nonzero", config.target_nonzero},
                 {"bins_per_feature", config.bins_per_feature},
                 {"discretize", std::vector<int>(config.discretize.begin(),
                                                 config.discretize.end())},
                 {"lambda_grid", config.lambda_grid},
                 {"seed", e.seed}};
  return j.dump(2);
}

}  // namespace explainkit
