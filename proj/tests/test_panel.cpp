#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "adaptens/panel.hpp"
#include "adaptens/synth.hpp"

using namespace adaptens;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

ForecastPanel random_panel(Index n, Index m, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(1.0, 2.0);
  ForecastPanel p;
  p.timestamps.resize(static_cast<std::size_t>(n));
  for (Index t = 0; t < n; ++t) p.timestamps[static_cast<std::size_t>(t)] = t;
  p.members = Matrix(n, m);
  p.targets = Vector(n);
  for (Index t = 0; t < n; ++t) {
    p.targets(t) = normal(rng);
    for (Index j = 0; j < m; ++j) p.members(t, j) = normal(rng);
  }
  for (Index j = 0; j < m; ++j) p.member_names.push_back("m" + std::to_string(j));
  return p;
}

}  // namespace

TEST_CASE("well-formed csv round-trips") {
  const auto path = write_temp("panel_ok.csv",
                               "timestamp,a,b,target\n"
                               "1,0.5,1.5,1.0\n"
                               "2,0.6,1.6,1.1\n"
                               "3,0.7,1.7,1.2\n"
                               "4,0.8,1.8,1.3\n");
  const ForecastPanel panel = load_panel(path);
  CHECK(panel.rows() == 4);
  CHECK(panel.member_count() == 2);
  CHECK(panel.member_names == std::vector<std::string>{"a", "b"});
  CHECK(panel.members(2, 1) == doctest::Approx(1.7));
  CHECK(panel.targets(3) == doctest::Approx(1.3));

  const auto out = fs::temp_directory_path() / "panel_out.csv";
  save_panel(panel, out);
  const ForecastPanel again = load_panel(out);
  CHECK(again.members == panel.members);
  CHECK(again.targets == panel.targets);
  CHECK(again.timestamps == panel.timestamps);
}

TEST_CASE("load is deterministic: same bytes, identical panel") {
  const auto path = write_temp("panel_det.csv",
                               "timestamp,a,target\n1,0.25,1\n2,0.5,2\n");
  const ForecastPanel p1 = load_panel(path);
  const ForecastPanel p2 = load_panel(path);
  CHECK(p1.members == p2.members);
  CHECK(p1.targets == p2.targets);
}

TEST_CASE("duplicated timestamp names the offending row") {
  const auto path = write_temp("panel_dup.csv",
                               "timestamp,a,target\n1,0.5,1\n2,0.6,2\n2,0.7,3\n");
  CHECK_THROWS_WITH_AS(load_panel(path),
                       doctest::Contains("row 3"), DataError);
}

TEST_CASE("nan and missing cells are rejected with their row") {
  const auto nan_path = write_temp("panel_nan.csv",
                                   "timestamp,a,target\n1,nan,1\n");
  CHECK_THROWS_WITH_AS(load_panel(nan_path), doctest::Contains("row 1"), DataError);
  const auto gap_path = write_temp("panel_gap.csv",
                                   "timestamp,a,target\n1,0.5,1\n2,,2\n");
  CHECK_THROWS_WITH_AS(load_panel(gap_path), doctest::Contains("row 2"), DataError);
}

TEST_CASE("storm file with two series keeps both segments") {
  std::string csv = "timestamp,a,target,storm\n";
  for (int t = 1; t <= 5; ++t)
    csv += std::to_string(t) + ",0.5," + std::to_string(t) + ",alpha\n";
  for (int t = 1; t <= 7; ++t)
    csv += std::to_string(t) + ",0.5," + std::to_string(t) + ",bravo\n";
  const auto path = write_temp("panel_storms.csv", csv);
  CsvSchema schema;
  schema.series_col = "storm";
  const ForecastPanel panel = load_panel(path, schema);
  CHECK(panel.rows() == 12);
  const auto segments = panel.segments();
  REQUIRE(segments.size() == 2);
  CHECK(segments[0].end - segments[0].begin == 5);
  CHECK(segments[1].end - segments[1].begin == 7);
  CHECK(panel.segment_begin(6) == 5);
}

TEST_CASE("series rows must be contiguous") {
  const auto path = write_temp("panel_splitseries.csv",
                               "timestamp,a,target,storm\n"
                               "1,0.5,1,alpha\n"
                               "1,0.5,1,bravo\n"
                               "2,0.5,1,alpha\n");
  CsvSchema schema;
  schema.series_col = "storm";
  CHECK_THROWS_AS(load_panel(path, schema), DataError);
}

TEST_CASE("chronological split sizes") {
  SUBCASE("paper split on 4000 rows") {
    const auto splits = split_chronological(random_panel(4000, 2, 1), {0.5, 0.25});
    CHECK(splits.train.rows() == 2000);
    CHECK(splits.val.rows() == 1000);
    CHECK(splits.test.rows() == 1000);
    CHECK(splits.val_begin == 2000);
    CHECK(splits.test_begin == 3000);
  }
  SUBCASE("ten rows") {
    const auto splits = split_chronological(random_panel(10, 2, 2), {0.5, 0.2});
    CHECK(splits.train.rows() == 5);
    CHECK(splits.val.rows() == 2);
    CHECK(splits.test.rows() == 3);
  }
  SUBCASE("degenerate split is an error") {
    CHECK_THROWS_AS(split_chronological(random_panel(3, 2, 3), {0.5, 0.4}),
                    DataError);
  }
}

TEST_CASE("splits concatenate back to the panel") {
  const ForecastPanel panel = random_panel(101, 3, 7);
  for (const SplitSpec spec : {SplitSpec{0.5, 0.25}, SplitSpec{0.3, 0.3},
                               SplitSpec{0.7, 0.1}}) {
    const auto splits = split_chronological(panel, spec);
    Matrix glued(panel.rows(), panel.member_count());
    glued << splits.train.members, splits.val.members, splits.test.members;
    CHECK(glued == panel.members);
    Vector y(panel.rows());
    y << splits.train.targets, splits.val.targets, splits.test.targets;
    CHECK(y == panel.targets);
  }
}

TEST_CASE("standardizer matches the hand computation") {
  ForecastPanel p = random_panel(2, 1, 9);
  p.targets << 1.0, 3.0;
  const Standardizer s = fit_standardizer(p);
  CHECK(s.mu == doctest::Approx(2.0));
  CHECK(s.sigma == doctest::Approx(std::sqrt(2.0)));  // sample std, T-1
  const ForecastPanel std_p = s.apply(p);
  CHECK(std_p.targets(0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(std_p.targets(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("standardized training targets have mean 0 and std 1") {
  const ForecastPanel panel = random_panel(500, 2, 11);
  const Standardizer s = fit_standardizer(panel);
  const ForecastPanel std_panel = s.apply(panel);
  CHECK(std::abs(std_panel.targets.mean()) < 1e-10);
  const double var = (std_panel.targets.array() - std_panel.targets.mean())
                         .square()
                         .sum() /
                     static_cast<double>(panel.rows() - 1);
  CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("constant targets cannot be standardized") {
  ForecastPanel p = random_panel(5, 1, 13);
  p.targets.setConstant(2.5);
  CHECK_THROWS_AS(fit_standardizer(p), NumericalError);
}

TEST_CASE("apply then invert is the identity") {
  const ForecastPanel panel = random_panel(64, 4, 17);
  const Standardizer s = fit_standardizer(panel);
  const ForecastPanel back = s.invert(s.apply(panel));
  CHECK(((back.members - panel.members).array().abs() /
         (panel.members.array().abs() + 1.0))
            .maxCoeff() < 1e-12);
  CHECK(((back.targets - panel.targets).array().abs() /
         (panel.targets.array().abs() + 1.0))
            .maxCoeff() < 1e-12);
}
