#include <doctest.h>

#include <cmath>
#include <random>

#include "adaptens/pipeline.hpp"

using namespace adaptens;

namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.horizon = 400;
  cfg.members = 4;
  cfg.drift = DriftKind::gaussian;
  cfg.sigma_drift = 0.4;
  cfg.s_drift = 0.4;
  cfg.seed = seed;
  return cfg;
}

GridSpec small_grid() {
  GridSpec grid;
  grid.lambda_grid = {1e-3, 1e-1};
  grid.window_grid = {2};
  grid.exp3_window_grid = {4};
  grid.pa_margin_grid = {0.0, 0.1};
  return grid;
}

}  // namespace

TEST_CASE("grid of size one equals the direct fit") {
  const ForecastPanel panel = generate_panel(small_config(5));
  GridSpec grid = small_grid();
  grid.lambda_grid = {0.05};

  BacktestOptions options;
  const RunResult rr = run_backtest(panel, grid, Method::ridge, options);
  CHECK(rr.chosen.lambda == 0.05);

  // Direct protocol: standardize train+val, ridge-fit, score the test rows.
  const auto splits = split_chronological(panel, options.split);
  const ForecastPanel trainval = panel.slice(0, splits.test_begin);
  const Standardizer scaler = fit_standardizer(trainval);
  const ForecastPanel trainval_std = scaler.apply(trainval);
  const Vector beta = ridge_fit(trainval_std.members, trainval_std.targets, 0.05);
  const ForecastPanel test_std = scaler.apply(splits.test);
  const Vector predictions = scaler.invert(test_std.members * beta);
  const MetricsReport expected = evaluate(splits.test.targets, predictions);
  CHECK(rr.test_report.rmse == doctest::Approx(expected.rmse).epsilon(1e-12));
  CHECK(rr.test_report.mae == doctest::Approx(expected.mae).epsilon(1e-12));
}

TEST_CASE("validation argmin picks the clearly better grid point") {
  const ForecastPanel panel = generate_panel(small_config(6));
  GridSpec grid = small_grid();
  grid.lambda_grid = {1e-3, 1e9};  // the huge weight shrinks everything away
  const RunResult rr = run_backtest(panel, grid, Method::ridge, {});
  CHECK(rr.chosen.lambda == 1e-3);
}

TEST_CASE("reruns are bitwise deterministic") {
  const ForecastPanel panel = generate_panel(small_config(7));
  const GridSpec grid = small_grid();
  const RunResult a = run_backtest(panel, grid, Method::adaptive_ridge, {});
  const RunResult b = run_backtest(panel, grid, Method::adaptive_ridge, {});
  CHECK(a.test_report.rmse == b.test_report.rmse);
  CHECK(a.test_report.cvar05 == b.test_report.cvar05);
  CHECK(a.chosen.lambda == b.chosen.lambda);
  CHECK(a.chosen.window == b.chosen.window);
}

TEST_CASE("every method runs end to end on a drifting panel") {
  const ForecastPanel panel = generate_panel(small_config(8));
  const GridSpec grid = small_grid();
  BacktestOptions options;
  options.collect_weights = true;
  options.assemble.allow_underdetermined = true;
  for (Method method : all_methods()) {
    const RunResult rr = run_backtest(panel, grid, method, options);
    CHECK(rr.test_report.n_cases == 100);
    CHECK(std::isfinite(rr.test_report.rmse));
    if (method == Method::adaptive_ridge) {
      CHECK(rr.rule.has_value());
      CHECK(rr.weights.rows() == 100);
      CHECK(rr.weights.cols() == panel.member_count());
    }
    if (method == Method::hindsight) CHECK(rr.hindsight_member >= 0);
  }
}

TEST_CASE("adaptive selection excludes lambda 0 in faithful mode only") {
  const ForecastPanel panel = generate_panel(small_config(9));
  GridSpec grid = small_grid();
  grid.lambda_grid = {0.0};
  CHECK_THROWS_AS(run_backtest(panel, grid, Method::adaptive_ridge, {}),
                  std::invalid_argument);
  BacktestOptions squared;
  squared.adaptive_mode = SolveMode::squared;
  CHECK_NOTHROW(run_backtest(panel, grid, Method::adaptive_ridge, squared));
}

TEST_CASE("leakage audit reports zero violations across a full backtest") {
  SynthConfig cfg = small_config(10);
  const ForecastPanel panel = generate_panel(cfg, 4);  // lead time t+4
  const GridSpec grid = small_grid();
  LeakAudit audit;
  BacktestOptions options;
  options.audit = &audit;
  for (Method method : all_methods()) {
    const RunResult rr = run_backtest(panel, grid, method, options);
    (void)rr;
    INFO("method ", name(method));
    CHECK(audit.violations().empty());
    if (method == Method::exp3 || method == Method::pa ||
        method == Method::adaptive_ridge) {
      CHECK(audit.reads() > 0);  // the harness actually observed traffic
    }
  }
}

TEST_CASE("leakage audit catches a violation when one happens") {
  LeakAudit audit;
  audit.configure(300, 4);
  audit.set_phase(LeakAudit::Phase::selection);
  audit.set_prediction_row(250);
  audit.record(246);  // exactly t - k: allowed
  CHECK(audit.violations().empty());
  audit.record(249);  // fresher than 250 - 4: lead-time violation
  REQUIRE(audit.violations().size() == 1);
  CHECK(audit.violations()[0].what.find("lead time") != std::string::npos);
  audit.record(301);  // test row during selection, and too fresh
  REQUIRE(audit.violations().size() == 3);
  CHECK(audit.violations()[1].what.find("test target") != std::string::npos);

  audit.set_phase(LeakAudit::Phase::evaluation);
  audit.set_prediction_row(350);
  audit.record(346);  // evaluation-phase read at t - k: allowed
  CHECK(audit.violations().size() == 3);
}

TEST_CASE("multi-series panels flow through the pipeline") {
  ForecastPanel panel = generate_panel(small_config(11));
  panel.series.assign(static_cast<std::size_t>(panel.rows()), "s1");
  for (Index t = panel.rows() / 2; t < panel.rows(); ++t)
    panel.series[static_cast<std::size_t>(t)] = "s2";
  // Re-number timestamps per series so the invariant holds.
  for (Index t = panel.rows() / 2; t < panel.rows(); ++t)
    panel.timestamps[static_cast<std::size_t>(t)] =
        panel.timestamps[static_cast<std::size_t>(t)] - panel.rows() / 2;
  panel.check();
  const GridSpec grid = small_grid();
  for (Method method : {Method::exp3, Method::pa, Method::adaptive_ridge}) {
    const RunResult rr = run_backtest(panel, grid, method, {});
    CHECK(std::isfinite(rr.test_report.rmse));
  }
}

TEST_CASE("campaign shape, determinism and self-consistency") {
  ExperimentCampaign campaign;
  campaign.base = small_config(0);
  campaign.axis = CampaignAxis::drift;
  campaign.values = {0.5};
  campaign.seeds = {1, 2};
  campaign.methods = {Method::ridge};
  campaign.grid = small_grid();
  campaign.fixed_window = 2;
  campaign.workers = 2;

  const CampaignResult result = run_campaign(campaign);
  CHECK(result.raw.size() == 2);
  CHECK(result.aggregates.size() == 1);
  CHECK(result.aggregates[0].n == 2);
  CHECK(result.failures == 0);

  // Aggregates equal recomputation from the raw rows.
  const double mean_rmse =
      (result.raw[0].report.rmse + result.raw[1].report.rmse) / 2.0;
  CHECK(result.aggregates[0].mean.rmse == doctest::Approx(mean_rmse).epsilon(1e-12));
  const double d0 = result.raw[0].report.rmse - mean_rmse;
  const double d1 = result.raw[1].report.rmse - mean_rmse;
  const double sd = std::sqrt(d0 * d0 + d1 * d1);  // n-1 = 1
  CHECK(result.aggregates[0].stddev.rmse == doctest::Approx(sd).epsilon(1e-12));

  const CampaignResult again = run_campaign(campaign);
  CHECK(result.raw_csv() == again.raw_csv());
  CHECK(result.results_csv() == again.results_csv());
  CHECK(result.chosen_params_json() == again.chosen_params_json());
}

TEST_CASE("campaign records failures and keeps going") {
  ExperimentCampaign campaign;
  campaign.base = small_config(0);
  campaign.base.horizon = 60;  // too small for tau = 2 with 4 members
  campaign.axis = CampaignAxis::drift;
  campaign.values = {0.5};
  campaign.seeds = {1};
  campaign.methods = {Method::adaptive_ridge, Method::mean};
  campaign.grid = small_grid();
  campaign.fixed_window = 2;
  campaign.allow_underdetermined = false;  // trip the parameter guard
  const CampaignResult result = run_campaign(campaign);
  CHECK(result.failures == 1);
  REQUIRE(result.raw.size() == 2);
  bool saw_failure = false;
  for (const auto& row : result.raw) {
    if (row.method == Method::adaptive_ridge) {
      CHECK(row.failed);
      CHECK(!row.error.empty());
      saw_failure = true;
    } else {
      CHECK_FALSE(row.failed);
    }
  }
  CHECK(saw_failure);
  CHECK(result.raw_csv().find("failed") != std::string::npos);
}

TEST_CASE("cell-level failures mark every method row and spare the campaign") {
  ExperimentCampaign campaign;
  campaign.base = small_config(0);
  campaign.axis = CampaignAxis::train_size;
  campaign.values = {100000};  // cannot fit before the test window
  campaign.seeds = {1};
  campaign.methods = {Method::mean, Method::ridge};
  campaign.grid = small_grid();
  const CampaignResult result = run_campaign(campaign);
  CHECK(result.failures == 2);
  REQUIRE(result.raw.size() == 2);
  for (const auto& row : result.raw) {
    CHECK(row.failed);
    CHECK(row.error.find("does not fit") != std::string::npos);
  }
}

TEST_CASE("train-size campaign slices the budget before a fixed test window") {
  ExperimentCampaign campaign;
  campaign.base = small_config(0);
  campaign.axis = CampaignAxis::train_size;
  campaign.values = {90};
  campaign.seeds = {3};
  campaign.methods = {Method::pa};
  campaign.grid = small_grid();
  const CampaignResult result = run_campaign(campaign);
  REQUIRE(result.raw.size() == 1);
  CHECK_FALSE(result.raw[0].failed);
  // Test window stays the standard final quarter: 100 rows of 400.
  CHECK(result.raw[0].report.n_cases == 100);
}

TEST_CASE("window campaign pins the adaptive window to the axis value") {
  ExperimentCampaign campaign;
  campaign.base = small_config(0);
  campaign.axis = CampaignAxis::window;
  campaign.values = {3};
  campaign.seeds = {4};
  campaign.methods = {Method::adaptive_ridge};
  campaign.grid = small_grid();
  const CampaignResult result = run_campaign(campaign);
  REQUIRE(result.raw.size() == 1);
  CHECK_FALSE(result.raw[0].failed);
  CHECK(result.raw[0].chosen.window == 3);
}

TEST_CASE("timing probe reports positive durations") {
  SynthConfig cfg;
  cfg.members = 3;
  cfg.seed = 1;
  const TimingPoint point = timing_probe(cfg, 200, 2, SolveMode::squared, 1e-2);
  CHECK(point.total() > 0.0);
  CHECK(point.train_rows == 200);
  CHECK(point.window == 2);
}

TEST_CASE("csv emitters keep their headers stable") {
  CHECK(std::string(name(Method::adaptive_ridge)) == "adaptive_ridge");
  CHECK(parse_method("pa") == Method::pa);
  CHECK_THROWS_AS(parse_method("nope"), std::invalid_argument);
  CHECK(parse_method_list("mean,ridge").size() == 2);
  CHECK(parse_method_list("all").size() == 6);
  CHECK(parse_axis("train_size") == CampaignAxis::train_size);
  CHECK(parse_metric("cvar15") == Metric::cvar15);
}
