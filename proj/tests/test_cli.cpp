#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "explainkit/cli.hpp"
#include "explainkit/reason_codes.hpp"
#include "explainkit/shapley.hpp"

using namespace explainkit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ShapleyExplanation make_explanation(std::vector<double> phi) {
  ShapleyExplanation e;
  e.phi = std::move(phi);
  e.base_value = 0.1;
  e.margin_prediction = e.base_value;
  for (double v : e.phi) e.margin_prediction += v;
  e.missing_mask.assign(e.phi.size(), true);
  return e;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TmpDir {
  fs::path path;
  TmpDir() {
    path = fs::temp_directory_path() /
           ("explainkit_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string str(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("reason_codes") {
  const std::vector<std::string> names{"income", "age", "utilization"};
  const std::vector<double> x{52000.0, 31.0, 0.92};

  SUBCASE("top-k positive contributions in descending order") {
    const auto list = reason_codes(make_explanation({0.3, -0.5, 0.9}), x, names, 2);
    REQUIRE(list.codes.size() == 2);
    CHECK_FALSE(list.flagged_short);
    CHECK(list.codes[0].feature == "utilization");
    CHECK(list.codes[0].rank == 1);
    CHECK(list.codes[0].phi == 0.9);
    CHECK(list.codes[0].observed_value == 0.92);
    CHECK(list.codes[1].feature == "income");
    CHECK(list.codes[1].rank == 2);
    CHECK(list.codes[0].text.find("utilization") != std::string::npos);
  }
  SUBCASE("all-negative attributions yield an empty, flagged list") {
    const auto list = reason_codes(make_explanation({-0.3, -0.5, -0.9}), x, names, 3);
    CHECK(list.codes.empty());
    CHECK(list.flagged_short);
  }
  SUBCASE("fewer positives than requested flags the shortfall") {
    const auto list = reason_codes(make_explanation({0.3, -0.5, -0.9}), x, names, 3);
    REQUIRE(list.codes.size() == 1);
    CHECK(list.flagged_short);
    CHECK(list.codes[0].feature == "income");
  }
  SUBCASE("ranking is invariant to uniform scaling") {
    const auto a = reason_codes(make_explanation({0.3, 0.2, 0.9}), x, names, 3);
    const auto b = reason_codes(make_explanation({3.0, 2.0, 9.0}), x, names, 3);
    REQUIRE(a.codes.size() == b.codes.size());
    for (std::size_t i = 0; i < a.codes.size(); ++i)
      CHECK(a.codes[i].feature == b.codes[i].feature);
  }
  SUBCASE("json round trips through a parser") {
    const auto list = reason_codes(make_explanation({0.3, -0.5, 0.9}), x, names, 2);
    const json j = json::parse(reason_codes_to_json(list));
    CHECK(j["codes"].size() == 2);
    CHECK(j["flagged_short"] == false);
    CHECK(j["codes"][0]["feature"] == "utilization");
  }
}

TEST_CASE("cli end-to-end pipeline on simulated data") {
  TmpDir tmp;
  const std::string out = tmp.path.string();

  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin() + 1, {"--out-dir", out});
    return cli::run(args);
  };

  REQUIRE(run({"simulate", "--rows", "800", "--out", "sim.csv", "--seed", "12345"}) == 0);
  REQUIRE(fs::exists(tmp.path / "sim.csv"));
  REQUIRE(fs::exists(tmp.path / "simulate_resolved_config.json"));

  REQUIRE(run({"train", "--data", tmp.str("sim.csv"), "--target", "label", "--max-rounds",
               "30", "--early-stopping", "0", "--out-model", "model.json"}) == 0);
  REQUIRE(fs::exists(tmp.path / "model.json"));
  const json metrics = json::parse(slurp(tmp.path / "metrics.json"));
  CHECK(metrics["validation_auc"].get<double>() > 0.5);
  CHECK(metrics["train_rows"].get<int>() + metrics["validation_rows"].get<int>() == 800);

  const std::vector<std::string> md{"--model", tmp.str("model.json"), "--data",
                                    tmp.str("sim.csv")};
  auto with_md = [&](std::vector<std::string> args) {
    args.insert(args.end(), md.begin(), md.end());
    return run(std::move(args));
  };

  SUBCASE("surrogate") {
    REQUIRE(with_md({"surrogate", "--depth", "3", "--folds", "3"}) == 0);
    const json j = json::parse(slurp(tmp.path / "surrogate.json"));
    CHECK(j["fidelity"]["r2"].get<double>() <= 1.0);
    CHECK(slurp(tmp.path / "surrogate.dot").find("digraph") != std::string::npos);
  }
  SUBCASE("pd and ice") {
    REQUIRE(with_md({"pd", "--feature", "num1", "--grid-points", "10", "--svg"}) == 0);
    CHECK(fs::exists(tmp.path / "pd.json"));
    CHECK(fs::exists(tmp.path / "pd.csv"));
    CHECK(fs::exists(tmp.path / "pd.svg"));
    REQUIRE(with_md({"ice", "--feature", "num8", "--grid-points", "10"}) == 0);
    const json j = json::parse(slurp(tmp.path / "ice.json"));
    CHECK(j["feature"] == "num8");
    CHECK(j["ice"].size() >= 1);
    REQUIRE(with_md({"pd", "--feature", "num1", "--feature-b", "num4", "--grid-points",
                     "5"}) == 0);
    const json j2 = json::parse(slurp(tmp.path / "pd2.json"));
    CHECK(j2["pd2"].size() == 5);
  }
  SUBCASE("lime") {
    REQUIRE(with_md({"lime", "--row", "3", "--samples", "600"}) == 0);
    const json j = json::parse(slurp(tmp.path / "lime.json"));
    CHECK(j["contributions"].size() == 12);
    CHECK(j["config"]["seed"].get<std::uint64_t>() == kDefaultSeed);
  }
  SUBCASE("shap, reasons, compare") {
    REQUIRE(with_md({"shap", "--row", "0", "--method", "exact"}) == 0);
    const json j = json::parse(slurp(tmp.path / "shap.json"));
    CHECK(j["features"].size() == 12);
    CHECK(j["link_space"] == "margin");
    double sum = j["base_value"].get<double>();
    for (const auto& f : j["features"]) sum += f["phi"].get<double>();
    CHECK(std::abs(sum - j["margin_prediction"].get<double>()) < 1e-8);

    REQUIRE(with_md({"reasons", "--row", "0", "--k", "2", "--method", "exact"}) == 0);
    const json r = json::parse(slurp(tmp.path / "reasons.json"));
    CHECK(r["codes"].size() <= 2);

    REQUIRE(with_md({"compare", "--row", "0", "--permutations", "100"}) == 0);
    const json c = json::parse(slurp(tmp.path / "compare.json"));
    CHECK(c["exact_available"] == true);
    CHECK(c["attributions"].size() == 12);
  }
  SUBCASE("summary") {
    REQUIRE(with_md({"summary", "--method", "path", "--budget", "50", "--svg"}) == 0);
    const json j = json::parse(slurp(tmp.path / "summary.json"));
    CHECK(j["ordering"].size() == 12);
    CHECK(fs::exists(tmp.path / "summary.svg"));
  }
  SUBCASE("reruns are byte-identical") {
    REQUIRE(with_md({"shap", "--row", "1", "--method", "sampled", "--permutations", "50"}) ==
            0);
    const std::string first = slurp(tmp.path / "shap.json");
    REQUIRE(with_md({"shap", "--row", "1", "--method", "sampled", "--permutations", "50"}) ==
            0);
    CHECK(slurp(tmp.path / "shap.json") == first);

    REQUIRE(run({"simulate", "--rows", "120", "--out", "rerun.csv"}) == 0);
    const std::string sim_first = slurp(tmp.path / "rerun.csv");
    REQUIRE(run({"simulate", "--rows", "120", "--out", "rerun.csv"}) == 0);
    CHECK(slurp(tmp.path / "rerun.csv") == sim_first);
  }
  SUBCASE("config file supplies defaults that flags override") {
    {
      std::ofstream cfg(tmp.path / "run.cfg");
      cfg << "seed = 777\n";
    }
    REQUIRE(run({"simulate", "--rows", "60", "--out", "cfg.csv", "--config",
                 tmp.str("run.cfg")}) == 0);
    const json echo = json::parse(slurp(tmp.path / "simulate_resolved_config.json"));
    CHECK(echo["seed"].get<std::uint64_t>() == 777);
    REQUIRE(run({"simulate", "--rows", "60", "--out", "cfg.csv", "--config",
                 tmp.str("run.cfg"), "--seed", "888"}) == 0);
    const json echo2 = json::parse(slurp(tmp.path / "simulate_resolved_config.json"));
    CHECK(echo2["seed"].get<std::uint64_t>() == 888);
  }
}

TEST_CASE("cli error handling") {
  TmpDir tmp;
  CHECK(cli::run({"shap", "--model", tmp.str("missing.json"), "--data", tmp.str("missing.csv"),
                  "--row", "0"}) != 0);
  CHECK(cli::run({"no-such-command"}) != 0);
}
