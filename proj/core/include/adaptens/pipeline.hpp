#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adaptens/adaptive.hpp"
#include "adaptens/baselines.hpp"
#include "adaptens/metrics.hpp"
#include "adaptens/synth.hpp"

namespace adaptens {

enum class Method { hindsight, mean, exp3, pa, ridge, adaptive_ridge };

const char* name(Method m);
Method parse_method(const std::string& s);
std::vector<Method> all_methods();
std::vector<Method> parse_method_list(const std::string& csv);  // "a,b,c" or "all"

enum class Metric { mae, rmse, mape, cvar05, cvar15 };
const char* name(Metric m);
Metric parse_metric(const std::string& s);
double metric_value(const MetricsReport& r, Metric m);

/// Hyperparameter grids searched on the validation split.
struct GridSpec {
  std::vector<double> lambda_grid = {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 2.0};
  std::vector<int> window_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> exp3_window_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> pa_margin_grid = {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 2.0};
  Metric validation_metric = Metric::mae;
};

/// Observes every target read made on behalf of a backtest, so a test can
/// prove that no method consumes ground truth it would not have in
/// real time, and that the test split is first touched after selection.
class LeakAudit {
 public:
  enum class Phase { idle, fit, selection, evaluation, scoring };

  void configure(Index test_begin, int lead_time);
  void set_phase(Phase phase);
  void set_prediction_row(Index row);  // global row being predicted
  void record(Index row);              // target read at a global row

  struct Violation {
    Phase phase;
    Index prediction_row;
    Index accessed_row;
    std::string what;
  };
  const std::vector<Violation>& violations() const { return violations_; }
  std::size_t reads() const { return reads_; }
  TargetAccess::Hook hook();

 private:
  Index test_begin_ = -1;
  int lead_time_ = 1;
  Phase phase_ = Phase::idle;
  Index prediction_row_ = -1;
  std::size_t reads_ = 0;
  std::vector<Violation> violations_;
};

struct ChosenParams {
  double lambda = std::numeric_limits<double>::quiet_NaN();
  int window = 0;
  int exp3_window = 0;
  double pa_margin = std::numeric_limits<double>::quiet_NaN();
  std::string json(Method method) const;
};

struct BacktestOptions {
  SplitSpec split{0.5, 0.25};
  // Explicit (train, val) row counts; overrides the fractions when set.
  std::optional<std::pair<Index, Index>> explicit_split;
  SolveMode adaptive_mode = SolveMode::faithful;
  AssembleOptions assemble{};
  SolveOptions solve{};          // mode is overridden by adaptive_mode
  LeakAudit* audit = nullptr;    // optional harness
  bool collect_weights = false;  // per-test-step coefficients
};

struct RunResult {
  Method method = Method::mean;
  MetricsReport test_report;
  ChosenParams chosen;
  double validation_score = std::numeric_limits<double>::quiet_NaN();
  double fit_seconds = 0.0;  // final refit (adaptive/ridge), else 0
  Matrix weights;            // test steps x m for time-varying methods
  Vector predictions;        // original scale, test window
  std::optional<AdaptiveRule> rule;
  FitDiagnostics diagnostics;
  Index hindsight_member = -1;
};

/// Full train / validate / retrain / test pass for one method:
/// fit each grid point on the training split, score it on validation,
/// pick the argmin (ties: smaller lambda, then smaller window), refit on
/// train+validation, evaluate once on test. Metrics are reported on the
/// original scale.
RunResult run_backtest(const ForecastPanel& panel, const GridSpec& grid,
                       Method method, const BacktestOptions& options = {});

enum class CampaignAxis { drift, members, window, train_size };
const char* name(CampaignAxis a);
CampaignAxis parse_axis(const std::string& s);

/// Seed-replicated synthetic experiment: one synthetic panel per
/// (value, seed) cell, every requested method backtested on it.
struct ExperimentCampaign {
  SynthConfig base;  // template; seed and the varied field are overwritten
  CampaignAxis axis = CampaignAxis::drift;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<Method> methods = all_methods();
  GridSpec grid;
  SplitSpec split{0.5, 0.25};
  SolveMode adaptive_mode = SolveMode::faithful;
  int fixed_window = 5;  // tau when the axis does not vary it
  bool allow_underdetermined = true;
  int workers = 0;  // 0: hardware concurrency
};

struct CampaignRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  Method method = Method::mean;
  MetricsReport report;
  ChosenParams chosen;
  double fit_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct CampaignAggregate {
  double value = 0.0;
  Method method = Method::mean;
  MetricsReport mean;
  MetricsReport stddev;  // sample standard deviation across seeds
  int n = 0;
};

struct CampaignResult {
  std::vector<CampaignRow> raw;  // sorted by (value, method, seed)
  std::vector<CampaignAggregate> aggregates;
  int failures = 0;

  std::string raw_csv() const;
  std::string results_csv() const;
  std::string chosen_params_json() const;
  std::string timing_csv() const;
};

CampaignResult run_campaign(const ExperimentCampaign& campaign);

// Aggregation used by run_campaign, exposed so reports can be recomputed
// from raw rows and checked for consistency.
std::vector<CampaignAggregate> aggregate_campaign(const std::vector<CampaignRow>& raw);

/// Wall-clock of one adaptive fit at the given shape (assembly + solve).
struct TimingPoint {
  Index train_rows = 0;
  Index members = 0;
  int window = 0;
  SolveMode mode = SolveMode::squared;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
  double total() const { return assemble_seconds + solve_seconds; }
};

TimingPoint timing_probe(const SynthConfig& cfg, Index train_rows, int window,
                         SolveMode mode, double lambda = 1e-2);

}  // namespace adaptens
