#include "explainkit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "explainkit/data.hpp"
#include "explainkit/gbm.hpp"
#include "explainkit/lime.hpp"
#include "explainkit/pdice.hpp"
#include "explainkit/reason_codes.hpp"
#include "explainkit/shapley.hpp"
#include "explainkit/surrogate.hpp"
#include "explainkit/svg.hpp"

namespace explainkit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_config_echo(const fs::path& out_dir, const std::string& sub, const json& resolved) {
  write_text(out_dir / (sub + "_resolved_config.json"), resolved.dump(2) + "\n");
}

Dataset load_data(const std::string& path, const std::string& target, const std::string& id) {
  return load_csv(path, target, id.empty() ? std::nullopt : std::make_optional(id));
}

void check_alignment(const GbmModel& model, const Dataset& data) {
  if (model.feature_names != data.feature_names)
    throw std::runtime_error("data columns do not match the model's feature layout");
}

int feature_index(const Dataset& data, const std::string& name) {
  for (std::size_t c = 0; c < data.n_cols(); ++c)
    if (data.feature_names[c] == name) return static_cast<int>(c);
  throw std::runtime_error("unknown feature '" + name + "'");
}

std::vector<int> auto_constraints(const Dataset& train, double min_abs_r) {
  std::vector<double> y(train.labels.begin(), train.labels.end());
  std::vector<int> out(train.n_cols(), 0);
  for (std::size_t c = 0; c < train.n_cols(); ++c) {
    try {
      const double r = pearson(train.features.cols[c], y);
      if (std::abs(r) >= min_abs_r) out[c] = r > 0 ? 1 : -1;
    } catch (const std::exception&) {
      out[c] = 0;  // constant column: leave unconstrained
    }
  }
  return out;
}

ShapleyExplanation explain_row(const GbmModel& model, const std::vector<double>& x,
                               const std::string& method, int permutations,
                               std::uint64_t seed) {
  if (method == "exact") return shapley_exact(model, x);
  if (method == "sampled") return shapley_sampled(model, x, permutations, seed);
  if (method == "path") return treeinterpreter_path(model, x);
  if (method == "auto")
    return model.feature_count() <= 20 ? shapley_exact(model, x)
                                       : shapley_sampled(model, x, permutations, seed);
  throw std::runtime_error("unknown attribution method '" + method + "'");
}

ShapMethod parse_method(const std::string& method, std::size_t p) {
  if (method == "exact") return ShapMethod::exact;
  if (method == "sampled") return ShapMethod::sampled;
  if (method == "path") return ShapMethod::path;
  if (method == "auto") return p <= 20 ? ShapMethod::exact : ShapMethod::sampled;
  throw std::runtime_error("unknown attribution method '" + method + "'");
}

struct CommonData {
  std::string data_path;
  std::string target = "label";
  std::string id_column;

  void attach(CLI::App* sub) {
    sub->add_option("--data", data_path, "Input CSV")->required();
    sub->add_option("--target", target, "Label column name");
    sub->add_option("--id", id_column, "Observation-id column to drop");
  }
};

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"explainkit: train a constrained GBM and explain it"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value config file; flags override");

  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = ".";
  app.add_option("--seed", seed, "Global seed")->envname("EXPLAINKIT_SEED");
  app.add_option("--out-dir", out_dir, "Output directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate the simulated signal dataset");
  SimConfig sim_cfg;
  std::string sim_out = "sim.csv";
  sim->add_option("--rows", sim_cfg.n_rows, "Rows to generate");
  sim->add_option("--noise-fraction", sim_cfg.noise_fraction, "Fraction of labels flipped");
  sim->add_option("--threshold", sim_cfg.threshold, "Signal threshold");
  sim->add_option("--out", sim_out, "Output CSV path");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the boosted classifier");
  CommonData train_data;
  train_data.attach(train_cmd);
  GbmConfig gbm_cfg;
  double valid_fraction = 0.3;
  std::string monotone = "none";
  std::string out_model = "model.json", out_metrics = "metrics.json";
  train_cmd->add_option("--valid-fraction", valid_fraction, "Validation fraction");
  train_cmd->add_option("--monotone", monotone, "auto | none");
  train_cmd->add_option("--learning-rate", gbm_cfg.learning_rate, "Shrinkage (eta)");
  train_cmd->add_option("--subsample", gbm_cfg.subsample, "Row subsample per round");
  train_cmd->add_option("--colsample", gbm_cfg.colsample, "Column subsample per tree");
  train_cmd->add_option("--max-depth", gbm_cfg.max_depth, "Tree depth limit");
  train_cmd->add_option("--max-rounds", gbm_cfg.max_rounds, "Boosting round limit");
  train_cmd->add_option("--early-stopping", gbm_cfg.early_stopping_rounds,
                        "Rounds without AUC improvement before stopping");
  train_cmd->add_option("--min-samples-leaf", gbm_cfg.min_samples_leaf, "Leaf size floor");
  train_cmd->add_option("--out-model", out_model, "Model JSON path");
  train_cmd->add_option("--out-metrics", out_metrics, "Metrics JSON path");

  // shared model/data options for the explainers
  std::string model_path;
  CommonData xdata;
  auto attach_model_data = [&](CLI::App* sub) {
    sub->add_option("--model", model_path, "Model JSON")->required();
    xdata.attach(sub);
  };

  // surrogate
  auto* surr = app.add_subcommand("surrogate", "Extract a global decision-tree surrogate");
  attach_model_data(surr);
  int surr_depth = 3, surr_folds = 3;
  surr->add_option("--depth", surr_depth, "Surrogate depth");
  surr->add_option("--folds", surr_folds, "CV folds (0 to skip)");

  // pd
  auto* pd_cmd = app.add_subcommand("pd", "Partial dependence for one feature (or a pair)");
  attach_model_data(pd_cmd);
  std::string pd_feature, pd_feature_b;
  int grid_points = 20;
  bool emit_svg = false;
  pd_cmd->add_option("--feature", pd_feature, "Feature name")->required();
  pd_cmd->add_option("--feature-b", pd_feature_b, "Second feature for 2-D PD");
  pd_cmd->add_option("--grid-points", grid_points, "Grid resolution");
  pd_cmd->add_flag("--svg", emit_svg, "Also write an SVG rendering");

  // ice
  auto* ice_cmd = app.add_subcommand("ice", "PD plus decile ICE curves and divergence");
  attach_model_data(ice_cmd);
  ice_cmd->add_option("--feature", pd_feature, "Feature name")->required();
  ice_cmd->add_option("--grid-points", grid_points, "Grid resolution");
  ice_cmd->add_flag("--svg", emit_svg, "Also write an SVG rendering");

  // lime
  auto* lime_cmd = app.add_subcommand("lime", "Sparse local linear explanation of one row");
  attach_model_data(lime_cmd);
  LimeConfig lime_cfg;
  std::size_t row_index = 0;
  std::string discretize_csv;
  int lime_repeats = 0;
  lime_cmd->add_option("--row", row_index, "Row to explain")->required();
  lime_cmd->add_option("--samples", lime_cfg.n_samples, "Locality sample count");
  lime_cmd->add_option("--kernel-width", lime_cfg.kernel_width, "Kernel width (0 = default)");
  lime_cmd->add_option("--target-nonzero", lime_cfg.target_nonzero, "Sparsity budget");
  lime_cmd->add_option("--discretize", discretize_csv, "Comma-separated feature names to bin");
  lime_cmd->add_option("--bins", lime_cfg.bins_per_feature, "Bins per discretized feature");
  lime_cmd->add_option("--repeats", lime_repeats, "Re-runs for contribution std (0 = skip)");

  // shap
  auto* shap_cmd = app.add_subcommand("shap", "Shapley attribution of one row");
  attach_model_data(shap_cmd);
  std::string method = "auto";
  int permutations = 200;
  shap_cmd->add_option("--row", row_index, "Row to explain")->required();
  shap_cmd->add_option("--method", method, "exact | sampled | path | auto");
  shap_cmd->add_option("--permutations", permutations, "Permutations for sampled method");

  // summary
  auto* sum_cmd = app.add_subcommand("summary", "Global Shapley summary over a dataset");
  attach_model_data(sum_cmd);
  std::size_t budget = 2000;
  sum_cmd->add_option("--method", method, "exact | sampled | path | auto");
  sum_cmd->add_option("--budget", budget, "Row budget (0 = all rows)");
  sum_cmd->add_option("--permutations", permutations, "Permutations for sampled method");
  sum_cmd->add_flag("--svg", emit_svg, "Also write an SVG rendering");

  // reasons
  auto* reasons_cmd = app.add_subcommand("reasons", "Adverse-action reason codes for one row");
  attach_model_data(reasons_cmd);
  int top_k = 3;
  reasons_cmd->add_option("--row", row_index, "Row to explain")->required();
  reasons_cmd->add_option("--k", top_k, "Number of codes");
  reasons_cmd->add_option("--method", method, "exact | sampled | path | auto");
  reasons_cmd->add_option("--permutations", permutations, "Permutations for sampled method");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "Exact vs sampled vs path attributions");
  attach_model_data(cmp_cmd);
  cmp_cmd->add_option("--row", row_index, "Row to explain")->required();
  cmp_cmd->add_option("--permutations", permutations, "Permutations for sampled method");

  // global --seed/--out-dir may appear after the subcommand name
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const fs::path out(out_dir);
  try {
    if (sim->parsed()) {
      sim_cfg.seed = seed;
      const Dataset data = simulate_signal(sim_cfg);
      save_csv(data, (out / sim_out).string());
      write_config_echo(out, "simulate",
                        {{"rows", sim_cfg.n_rows},
                         {"seed", sim_cfg.seed},
                         {"noise_fraction", sim_cfg.noise_fraction},
                         {"threshold", sim_cfg.threshold},
                         {"out", sim_out}});
    } else if (train_cmd->parsed()) {
      gbm_cfg.seed = seed;
      const Dataset data =
          load_data(train_data.data_path, train_data.target, train_data.id_column);
      auto [train, valid] = split(data, valid_fraction, seed);
      std::vector<int> constraints;
      if (monotone == "auto")
        constraints = auto_constraints(train, 0.01);
      else if (monotone != "none")
        throw std::runtime_error("--monotone must be auto or none");
      const GbmModel model = fit_gbm(train, valid, gbm_cfg, constraints);
      write_text(out / out_model, model_to_json(model) + "\n");
      json metrics{{"validation_auc", model.best_validation_auc},
                   {"best_round", model.best_round},
                   {"trained_rounds", model.trained_rounds},
                   {"train_rows", train.n_rows()},
                   {"validation_rows", valid.n_rows()},
                   {"constraints", model.constraints}};
      write_text(out / out_metrics, metrics.dump(2) + "\n");
      write_config_echo(out, "train",
                        {{"data", train_data.data_path},
                         {"target", train_data.target},
                         {"id", train_data.id_column},
                         {"valid_fraction", valid_fraction},
                         {"monotone", monotone},
                         {"learning_rate", gbm_cfg.learning_rate},
                         {"subsample", gbm_cfg.subsample},
                         {"colsample", gbm_cfg.colsample},
                         {"max_depth", gbm_cfg.max_depth},
                         {"max_rounds", gbm_cfg.max_rounds},
                         {"early_stopping", gbm_cfg.early_stopping_rounds},
                         {"min_samples_leaf", gbm_cfg.min_samples_leaf},
                         {"seed", seed}});
    } else {
      // all remaining subcommands consume a trained model plus a dataset
      const GbmModel model = load_model(model_path);
      const Dataset data = load_data(xdata.data_path, xdata.target, xdata.id_column);
      check_alignment(model, data);
      const ScoreFn score = model.score_fn();

      if (surr->parsed()) {
        SurrogateReport report = extract_surrogate(score, data, surr_depth);
        if (surr_folds >= 2)
          report.cv = cv_stability(score, data, surr_depth, surr_folds, seed);
        write_text(out / "surrogate.json",
                   surrogate_report_to_json(report, data.feature_names) + "\n");
        write_text(out / "surrogate.dot", export_dot(report.tree, data.feature_names));
        write_config_echo(out, "surrogate",
                          {{"model", model_path},
                           {"data", xdata.data_path},
                           {"depth", surr_depth},
                           {"folds", surr_folds},
                           {"seed", seed}});
      } else if (pd_cmd->parsed() || ice_cmd->parsed()) {
        const std::string sub = pd_cmd->parsed() ? "pd" : "ice";
        const int f = feature_index(data, pd_feature);
        if (!pd_feature_b.empty()) {
          const int fb = feature_index(data, pd_feature_b);
          const auto grid_a = make_grid(data.features.cols[static_cast<std::size_t>(f)],
                                        grid_points);
          const auto grid_b = make_grid(data.features.cols[static_cast<std::size_t>(fb)],
                                        grid_points);
          const auto matrix = pd2(score, data, f, fb, grid_a, grid_b);
          json j{{"feature_a", pd_feature}, {"feature_b", pd_feature_b},
                 {"grid_a", grid_a},        {"grid_b", grid_b},
                 {"pd2", matrix}};
          write_text(out / "pd2.json", j.dump(2) + "\n");
        } else {
          const PdIceResult result = compute_pdice(score, data, f, grid_points);
          write_text(out / (sub + ".json"), pdice_to_json(result, pd_feature));
          write_text(out / (sub + ".csv"), pdice_to_csv(result, pd_feature));
          if (emit_svg) {
            std::vector<SvgSeries> series;
            for (std::size_t i = 0; i < result.ice.size(); ++i)
              series.push_back({"ice_" + std::to_string(result.instance_ids[i]), result.grid,
                                result.ice[i], "lightsteelblue", 1.0});
            series.push_back({"pd", result.grid, result.pd, "crimson", 2.5});
            write_text(out / (sub + ".svg"),
                       svg_line_chart(series, sub + ": " + pd_feature));
          }
        }
        write_config_echo(out, sub,
                          {{"model", model_path},
                           {"data", xdata.data_path},
                           {"feature", pd_feature},
                           {"feature_b", pd_feature_b},
                           {"grid_points", grid_points},
                           {"seed", seed}});
      } else if (lime_cmd->parsed()) {
        lime_cfg.seed = seed;
        if (!discretize_csv.empty()) {
          std::stringstream ss(discretize_csv);
          std::string name;
          while (std::getline(ss, name, ','))
            lime_cfg.discretize.insert(feature_index(data, name));
        }
        if (row_index >= data.n_rows()) throw std::runtime_error("--row out of range");
        const auto x = data.features.row(row_index);
        const LimeExplanation e = explain_lime(score, x, data, lime_cfg);
        json j = json::parse(lime_to_json(e, data.feature_names, x, lime_cfg));
        if (lime_repeats >= 2)
          j["contribution_std"] = lime_cv_std(score, x, data, lime_cfg, lime_repeats);
        write_text(out / "lime.json", j.dump(2) + "\n");
        write_config_echo(out, "lime",
                          {{"model", model_path},
                           {"data", xdata.data_path},
                           {"row", row_index},
                           {"samples", lime_cfg.n_samples},
                           {"seed", seed}});
      } else if (shap_cmd->parsed()) {
        if (row_index >= data.n_rows()) throw std::runtime_error("--row out of range");
        const auto x = data.features.row(row_index);
        const auto e = explain_row(model, x, method, permutations, seed);
        write_text(out / "shap.json", shapley_to_json(e, data.feature_names, x) + "\n");
        write_config_echo(out, "shap",
                          {{"model", model_path},
                           {"data", xdata.data_path},
                           {"row", row_index},
                           {"method", method},
                           {"permutations", permutations},
                           {"seed", seed}});
      } else if (sum_cmd->parsed()) {
        const SummaryReport report =
            summarize(model, data, parse_method(method, model.feature_count()), budget, seed,
                      permutations);
        write_text(out / "summary.json", summary_to_json(report, data.feature_names) + "\n");
        if (emit_svg) {
          std::vector<std::string> labels;
          std::vector<double> values;
          for (int f : report.ordering) {
            labels.push_back(data.feature_names[static_cast<std::size_t>(f)]);
            values.push_back(report.mean_abs_phi[static_cast<std::size_t>(f)]);
          }
          write_text(out / "summary.svg", svg_bar_chart(labels, values, "mean |phi|"));
        }
        write_config_echo(out, "summary",
                          {{"model", model_path},
                           {"data", xdata.data_path},
                           {"method", method},
                           {"budget", budget},
                           {"permutations", permutations},
                           {"seed", seed}});
      } else if (reasons_cmd->parsed()) {
        if (row_index >= data.n_rows()) throw std::runtime_error("--row out of range");
        const auto x = data.features.row(row_index);
        const auto e = explain_row(model, x, method, permutations, seed);
        const auto codes = reason_codes(e, x, data.feature_names, top_k);
        write_text(out / "reasons.json", reason_codes_to_json(codes) + "\n");
        write_config_echo(out, "reasons",
                          {{"model", model_path},
                           {"data", xdata.data_path},
                           {"row", row_index},
                           {"k", top_k},
                           {"method", method},
                           {"seed", seed}});
      } else if (cmp_cmd->parsed()) {
        if (row_index >= data.n_rows()) throw std::runtime_error("--row out of range");
        const auto x = data.features.row(row_index);
        const auto sampled = shapley_sampled(model, x, permutations, seed);
        const auto path = treeinterpreter_path(model, x);
        json j;
        j["row"] = row_index;
        const bool have_exact = model.feature_count() <= 20;
        std::optional<ShapleyExplanation> exact;
        if (have_exact) exact = shapley_exact(model, x);
        double max_disc = 0;
        json table = json::array();
        for (std::size_t f = 0; f < model.feature_count(); ++f) {
          json rowj{{"feature", data.feature_names[f]},
                    {"value", x[f]},
                    {"sampled", sampled.phi[f]},
                    {"path", path.phi[f]}};
          if (exact) {
            rowj["exact"] = exact->phi[f];
            max_disc = std::max({max_disc, std::abs(exact->phi[f] - sampled.phi[f]),
                                 std::abs(exact->phi[f] - path.phi[f])});
          } else {
            max_disc = std::max(max_disc, std::abs(sampled.phi[f] - path.phi[f]));
          }
          table.push_back(std::move(rowj));
        }
        j["attributions"] = std::move(table);
        j["max_discrepancy"] = max_disc;
        j["exact_available"] = have_exact;
        write_text(out / "compare.json", j.dump(2) + "\n");
        write_config_echo(out, "compare",
                          {{"model", model_path},
                           {"data", xdata.data_path},
                           {"row", row_index},
                           {"permutations", permutations},
                           {"seed", seed}});
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace explainkit::cli
