#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "explainkit/data.hpp"

using namespace explainkit;
namespace fs = std::filesystem;

TEST_CASE("signal label threshold arithmetic") {
  std::vector<double> row(12, 0.0);
  row[0] = 1.0;  // num1
  row[3] = 1.0;  // num4
  CHECK(signal_label(row, 0.42) == 1);
  std::vector<double> zeros(12, 0.0);
  CHECK(signal_label(zeros, 0.42) == 0);
}

TEST_CASE("simulate_signal shape and clean-label property") {
  SimConfig cfg;
  cfg.n_rows = 500;
  cfg.noise_fraction = 0.0;
  const Dataset d = simulate_signal(cfg);
  CHECK(d.n_cols() == 12);
  CHECK(d.n_rows() == 500);
  CHECK(d.feature_names.front() == "num1");
  CHECK(d.feature_names.back() == "num12");
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    CHECK(d.labels[r] == signal_label(d.features.row(r), cfg.threshold));
    for (std::size_t c = 0; c < 12; ++c) {
      CHECK(d.features(r, c) >= -1.0);
      CHECK(d.features(r, c) <= 1.0);
    }
  }
}

TEST_CASE("simulate_signal flips exactly round(fraction*n) labels") {
  SimConfig clean{1000, 7, 0.0, 0.42};
  SimConfig noisy{1000, 7, 0.15, 0.42};
  const Dataset a = simulate_signal(clean);
  const Dataset b = simulate_signal(noisy);
  int flipped = 0;
  for (std::size_t r = 0; r < 1000; ++r)
    if (a.labels[r] != b.labels[r]) ++flipped;
  CHECK(flipped == 150);
  // features untouched by flipping
  CHECK(a.features.cols == b.features.cols);
}

TEST_CASE("simulate_signal determinism") {
  SimConfig cfg{200, 99, 0.15, 0.42};
  const Dataset a = simulate_signal(cfg);
  const Dataset b = simulate_signal(cfg);
  CHECK(a.features.cols == b.features.cols);
  CHECK(a.labels == b.labels);
}

namespace {
Dataset index_dataset(std::size_t n) {
  Dataset d;
  d.feature_names = {"x"};
  d.features.n_rows = n;
  d.features.cols.resize(1);
  for (std::size_t i = 0; i < n; ++i) d.features.cols[0].push_back(static_cast<double>(i));
  d.labels.assign(n, 0);
  return d;
}
}  // namespace

TEST_CASE("split sizes, partition, determinism") {
  const Dataset d = index_dataset(10);
  auto [train, valid] = split(d, 0.3, 42);
  CHECK(valid.n_rows() == 3);
  CHECK(train.n_rows() == 7);
  std::set<double> all(train.features.cols[0].begin(), train.features.cols[0].end());
  all.insert(valid.features.cols[0].begin(), valid.features.cols[0].end());
  CHECK(all.size() == 10);

  auto [train2, valid2] = split(d, 0.3, 42);
  CHECK(train.features.cols == train2.features.cols);
  CHECK(valid.features.cols == valid2.features.cols);

  auto [t7, v7] = split(d, 0.7, 42);
  CHECK(v7.n_rows() == 7);
  CHECK(t7.n_rows() == 3);
}

TEST_CASE("split matches the shuffle-prefix permutation oracle") {
  const Dataset d = index_dataset(20);
  auto [train, valid] = split(d, 0.3, 1234);

  std::vector<std::size_t> idx(20);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(1234);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::set<double> expected_valid(idx.begin(), idx.begin() + 6);

  std::set<double> got_valid(valid.features.cols[0].begin(), valid.features.cols[0].end());
  std::set<double> expected(expected_valid.begin(), expected_valid.end());
  CHECK(got_valid == expected);
}

TEST_CASE("split rejects degenerate partitions") {
  const Dataset d = index_dataset(3);
  CHECK_THROWS(split(d, 0.01, 1));  // rounds to empty validation
  CHECK_THROWS(split(d, 1.5, 1));
}

TEST_CASE("pearson") {
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
  CHECK_THROWS(pearson({1, 1, 1}, {1, 2, 3}));
  CHECK_THROWS(pearson({1}, {2}));

  // pearson(x, a*x + b) = sign(a) for any non-constant x
  std::vector<double> x{0.3, -1.2, 4.4, 2.0, 0.0};
  std::vector<double> up(x.size()), down(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    up[i] = 2.5 * x[i] + 1.0;
    down[i] = -0.7 * x[i] + 3.0;
  }
  CHECK(pearson(x, up) == doctest::Approx(1.0));
  CHECK(pearson(x, down) == doctest::Approx(-1.0));
}

TEST_CASE("column_stats") {
  auto s = column_stats(std::vector<double>{1, 2, 3, 4}, {0.5});
  CHECK(s.quantiles[0].second == doctest::Approx(2.0));  // lower interpolation
  auto single = column_stats(std::vector<double>{5}, {0.1, 0.9});
  CHECK(single.quantiles[0].second == doctest::Approx(5.0));
  CHECK(single.quantiles[1].second == doctest::Approx(5.0));
  auto m = column_stats(std::vector<double>{3, 1, 2}, {});
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.std == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(m.min == doctest::Approx(1.0));
  CHECK(m.max == doctest::Approx(3.0));
}

TEST_CASE("load_csv") {
  const fs::path dir = fs::temp_directory_path() / "explainkit_csv_test";
  fs::create_directories(dir);

  SUBCASE("basic file with id column") {
    const fs::path p = dir / "basic.csv";
    std::ofstream(p) << "ID,a,y\n1,0.5,0\n2,1.5,1\n";
    const Dataset d = load_csv(p.string(), "y", "ID");
    CHECK(d.feature_names == std::vector<std::string>{"a"});
    CHECK(d.n_rows() == 2);
    CHECK(d.labels == std::vector<int>{0, 1});
    CHECK(d.features(1, 0) == doctest::Approx(1.5));
  }

  SUBCASE("missing file") { CHECK_THROWS(load_csv((dir / "nope.csv").string(), "y")); }

  SUBCASE("missing target") {
    const fs::path p = dir / "no_target.csv";
    std::ofstream(p) << "a,b\n1,2\n";
    CHECK_THROWS_WITH_AS(load_csv(p.string(), "y"),
                         doctest::Contains("target column 'y' not found"), std::runtime_error);
  }

  SUBCASE("bad cell names row and column") {
    const fs::path p = dir / "bad.csv";
    std::ofstream(p) << "a,y\n1,0\noops,1\n";
    try {
      load_csv(p.string(), "y");
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 2") != std::string::npos);
      CHECK(msg.find("'a'") != std::string::npos);
    }
  }

  SUBCASE("round trip through save_csv") {
    SimConfig cfg{50, 3, 0.1, 0.42};
    const Dataset d = simulate_signal(cfg);
    const fs::path p = dir / "sim.csv";
    save_csv(d, p.string());
    const Dataset back = load_csv(p.string(), "label");
    CHECK(back.feature_names == d.feature_names);
    CHECK(back.labels == d.labels);
    for (std::size_t c = 0; c < d.n_cols(); ++c)
      for (std::size_t r = 0; r < d.n_rows(); ++r)
        CHECK(back.features(r, c) == doctest::Approx(d.features(r, c)).epsilon(1e-15));
  }
}
