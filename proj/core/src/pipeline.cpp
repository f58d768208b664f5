#include "adaptens/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace adaptens {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const char* name(Method m) {
  switch (m) {
    case Method::hindsight: return "hindsight";
    case Method::mean: return "mean";
    case Method::exp3: return "exp3";
    case Method::pa: return "pa";
    case Method::ridge: return "ridge";
    case Method::adaptive_ridge: return "adaptive_ridge";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (Method m : all_methods())
    if (s == name(m)) return m;
  throw std::invalid_argument("unknown method '" + s + "'");
}

std::vector<Method> all_methods() {
  return {Method::hindsight, Method::mean,  Method::exp3,
          Method::pa,        Method::ridge, Method::adaptive_ridge};
}

std::vector<Method> parse_method_list(const std::string& csv) {
  if (csv.empty() || csv == "all") return all_methods();
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_method(item));
  if (out.empty()) throw std::invalid_argument("empty method list");
  return out;
}

const char* name(Metric m) {
  switch (m) {
    case Metric::mae: return "mae";
    case Metric::rmse: return "rmse";
    case Metric::mape: return "mape";
    case Metric::cvar05: return "cvar05";
    case Metric::cvar15: return "cvar15";
  }
  return "?";
}

Metric parse_metric(const std::string& s) {
  if (s == "mae") return Metric::mae;
  if (s == "rmse") return Metric::rmse;
  if (s == "mape") return Metric::mape;
  if (s == "cvar05") return Metric::cvar05;
  if (s == "cvar15") return Metric::cvar15;
  throw std::invalid_argument("unknown metric '" + s + "'");
}

double metric_value(const MetricsReport& r, Metric m) {
  switch (m) {
    case Metric::mae: return r.mae;
    case Metric::rmse: return r.rmse;
    case Metric::mape: return r.mape_percent;
    case Metric::cvar05: return r.cvar05;
    case Metric::cvar15: return r.cvar15;
  }
  return 0.0;
}

namespace {

double single_metric(const Vector& y, const Vector& y_hat, Metric m) {
  switch (m) {
    case Metric::mae: return mae(y, y_hat);
    case Metric::rmse: return rmse(y, y_hat);
    case Metric::mape: return mape(y, y_hat);
    case Metric::cvar05: return cvar(y, y_hat, 0.05);
    case Metric::cvar15: return cvar(y, y_hat, 0.15);
  }
  return 0.0;
}

}  // namespace

void LeakAudit::configure(Index test_begin, int lead_time) {
  test_begin_ = test_begin;
  lead_time_ = lead_time;
  phase_ = Phase::idle;
  prediction_row_ = -1;
  reads_ = 0;
  violations_.clear();
}

void LeakAudit::set_phase(Phase phase) {
  phase_ = phase;
  prediction_row_ = -1;
}

void LeakAudit::set_prediction_row(Index row) { prediction_row_ = row; }

void LeakAudit::record(Index row) {
  ++reads_;
  if ((phase_ == Phase::fit || phase_ == Phase::selection) &&
      test_begin_ >= 0 && row >= test_begin_) {
    violations_.push_back({phase_, prediction_row_, row,
                           "test target read before evaluation"});
  }
  if ((phase_ == Phase::selection || phase_ == Phase::evaluation) &&
      prediction_row_ >= 0 && row > prediction_row_ - lead_time_) {
    violations_.push_back({phase_, prediction_row_, row,
                           "target fresher than the lead time allows"});
  }
}

TargetAccess::Hook LeakAudit::hook() {
  return [this](Index row) { record(row); };
}

std::string ChosenParams::json(Method method) const {
  std::string s = "{";
  bool first = true;
  auto add = [&](const std::string& key, const std::string& value) {
    if (!first) s += ",";
    s += "\"" + key + "\":" + value;
    first = false;
  };
  switch (method) {
    case Method::adaptive_ridge:
      add("lambda", fmt(lambda));
      add("window", std::to_string(window));
      break;
    case Method::ridge:
      add("lambda", fmt(lambda));
      break;
    case Method::exp3:
      add("window", std::to_string(exp3_window));
      break;
    case Method::pa:
      add("margin", fmt(pa_margin));
      break;
    default:
      break;
  }
  s += "}";
  return s;
}

namespace {

struct SplitLayout {
  Index n_train = 0;
  Index val_begin = 0;
  Index test_begin = 0;
};

SplitLayout resolve_split(const ForecastPanel& panel, const BacktestOptions& options) {
  SplitLayout layout;
  if (options.explicit_split) {
    const auto [n_train, n_val] = *options.explicit_split;
    if (n_train < 1 || n_val < 1 || n_train + n_val >= panel.rows())
      throw DataError("explicit split leaves an empty part");
    layout.n_train = n_train;
    layout.val_begin = n_train;
    layout.test_begin = n_train + n_val;
    return layout;
  }
  const PanelSplits splits = split_chronological(panel, options.split);
  layout.n_train = splits.val_begin;
  layout.val_begin = splits.val_begin;
  layout.test_begin = splits.test_begin;
  return layout;
}

// Runs an online combiner across rows [0, end) of the standardized panel
// with lead-time discipline; predictions recorded for [eval_begin, end).
// Weights carry across series; regret windows do not.
template <class Combiner>
Vector run_online(const ForecastPanel& std_panel, Index eval_begin, Index end,
                  Combiner& combiner, LeakAudit* audit, Matrix* weights_out) {
  const int k = std_panel.lead_time;
  Vector predictions(end - eval_begin);
  if (weights_out)
    *weights_out = Matrix(end - eval_begin, std_panel.member_count());
  const TargetAccess targets(std_panel.targets,
                             audit ? audit->hook() : TargetAccess::Hook{});
  for (const auto& seg : std_panel.segments()) {
    if (seg.begin >= end) break;
    combiner.reset_window();
    Index revealed = seg.begin;
    const Index seg_end = std::min(seg.end, end);
    for (Index t = seg.begin; t < seg_end; ++t) {
      if (audit) audit->set_prediction_row(t);
      while (revealed <= t - k && revealed < seg.end) {
        combiner.observe(std_panel.members.row(revealed), targets(revealed));
        ++revealed;
      }
      if (t >= eval_begin) {
        predictions(t - eval_begin) = combiner.predict(std_panel.members.row(t));
        if (weights_out) weights_out->row(t - eval_begin) = combiner.weights();
      }
    }
  }
  return predictions;
}

// Contexts for every row of a standardized evaluation slice, built within
// the slice exactly as the real-time prediction rule would see them.
Matrix evaluation_contexts(const ForecastPanel& std_slice, Index global_offset,
                           int tau, int k, LeakAudit* audit) {
  const Index n = std_slice.rows();
  const Index mt = std_slice.member_count() * static_cast<Index>(tau);
  Matrix contexts(n, mt);
  const TargetAccess targets(std_slice.targets,
                             audit ? audit->hook() : TargetAccess::Hook{},
                             global_offset);
  for (Index t = 0; t < n; ++t) {
    if (audit) audit->set_prediction_row(global_offset + t);
    contexts.row(t) = build_context(std_slice.members, targets,
                                    std_slice.segment_begin(t), t, tau, k)
                          .z;
  }
  return contexts;
}

Vector rule_predictions(const AdaptiveRule& rule, const ForecastPanel& std_slice,
                        const Matrix& contexts, Matrix* weights_out) {
  const Index n = std_slice.rows();
  Vector out(n);
  if (weights_out) *weights_out = Matrix(n, std_slice.member_count());
  for (Index t = 0; t < n; ++t) {
    const Vector beta = rule.coefficients(contexts.row(t));
    out(t) = std_slice.members.row(t).dot(beta);
    if (weights_out) weights_out->row(t) = beta;
  }
  return out;
}

struct GridPointFailure {
  std::string point;
  std::string error;
};

[[noreturn]] void throw_all_points_failed(const std::vector<GridPointFailure>& failures) {
  std::string what = "every grid point failed:";
  for (const auto& f : failures) what += "\n  " + f.point + ": " + f.error;
  throw NumericalError(what);
}

}  // namespace

RunResult run_backtest(const ForecastPanel& panel, const GridSpec& grid,
                       Method method, const BacktestOptions& options) {
  const SplitLayout layout = resolve_split(panel, options);
  const Index test_begin = layout.test_begin;
  const int k = panel.lead_time;
  LeakAudit* audit = options.audit;
  if (audit) audit->configure(test_begin, k);

  const ForecastPanel train = panel.slice(0, layout.n_train);
  const ForecastPanel val = panel.slice(layout.val_begin, test_begin);
  const ForecastPanel test = panel.slice(test_begin, panel.rows());
  const ForecastPanel trainval = panel.slice(0, test_begin);

  RunResult result;
  result.method = method;

  // Non-causal benchmark and the equal-weight combiner have nothing to tune.
  if (method == Method::hindsight) {
    if (audit) audit->set_phase(LeakAudit::Phase::scoring);
    const HindsightResult h = best_in_hindsight(test);
    result.hindsight_member = h.member;
    result.test_report = h.report;
    result.predictions = test.members.col(h.member);
    return result;
  }
  if (method == Method::mean) {
    if (audit) audit->set_phase(LeakAudit::Phase::evaluation);
    Vector predictions(test.rows());
    for (Index t = 0; t < test.rows(); ++t)
      predictions(t) = ensemble_mean(test.members.row(t));
    if (audit) audit->set_phase(LeakAudit::Phase::scoring);
    result.test_report = evaluate(test.targets, predictions);
    result.predictions = predictions;
    return result;
  }

  const Metric vmetric = grid.validation_metric;
  std::vector<GridPointFailure> failures;

  if (method == Method::exp3 || method == Method::pa) {
    const Standardizer scaler_sel = fit_standardizer(train);
    const ForecastPanel std_panel_sel = scaler_sel.apply(panel);

    double best_score = std::numeric_limits<double>::infinity();
    bool found = false;
    if (audit) audit->set_phase(LeakAudit::Phase::selection);

    if (method == Method::exp3) {
      for (int t0 : grid.exp3_window_grid) {
        try {
          Exp3Combiner combiner(panel.member_count(), Exp3Config{t0});
          const Vector pred_std = run_online(std_panel_sel, layout.val_begin,
                                             test_begin, combiner, audit, nullptr);
          const double score =
              single_metric(val.targets, scaler_sel.invert(pred_std), vmetric);
          if (!found || score < best_score) {
            best_score = score;
            result.chosen.exp3_window = t0;
            found = true;
          }
        } catch (const std::exception& e) {
          failures.push_back({"t0=" + std::to_string(t0), e.what()});
        }
      }
    } else {
      for (double margin : grid.pa_margin_grid) {
        try {
          PaCombiner combiner(panel.member_count(), PaConfig{margin});
          const Vector pred_std = run_online(std_panel_sel, layout.val_begin,
                                             test_begin, combiner, audit, nullptr);
          const double score =
              single_metric(val.targets, scaler_sel.invert(pred_std), vmetric);
          if (!found || score < best_score) {
            best_score = score;
            result.chosen.pa_margin = margin;
            found = true;
          }
        } catch (const std::exception& e) {
          failures.push_back({"margin=" + fmt(margin), e.what()});
        }
      }
    }
    if (!found) throw_all_points_failed(failures);
    result.validation_score = best_score;

    // Rerun with the chosen parameter; the state evolves online, so the
    // "refit" is simply the same protocol rolled forward over train+val.
    const Standardizer scaler_fit = fit_standardizer(trainval);
    const ForecastPanel std_panel_fit = scaler_fit.apply(panel);
    if (audit) audit->set_phase(LeakAudit::Phase::evaluation);
    Vector pred_std;
    Matrix* weights = options.collect_weights ? &result.weights : nullptr;
    if (method == Method::exp3) {
      Exp3Combiner combiner(panel.member_count(), Exp3Config{result.chosen.exp3_window});
      pred_std = run_online(std_panel_fit, test_begin, panel.rows(), combiner,
                            audit, weights);
    } else {
      PaCombiner combiner(panel.member_count(), PaConfig{result.chosen.pa_margin});
      pred_std = run_online(std_panel_fit, test_begin, panel.rows(), combiner,
                            audit, weights);
    }
    const Vector predictions = scaler_fit.invert(pred_std);
    if (audit) audit->set_phase(LeakAudit::Phase::scoring);
    result.test_report = evaluate(test.targets, predictions);
    result.predictions = predictions;
    return result;
  }

  if (method == Method::ridge) {
    const Standardizer scaler_sel = fit_standardizer(train);
    const ForecastPanel train_std = scaler_sel.apply(train);
    const ForecastPanel val_std = scaler_sel.apply(val);

    double best_score = std::numeric_limits<double>::infinity();
    bool found = false;
    if (audit) audit->set_phase(LeakAudit::Phase::selection);
    for (double lambda : grid.lambda_grid) {
      try {
        const Vector beta = ridge_fit(train_std.members, train_std.targets, lambda);
        const Vector pred_std = val_std.members * beta;
        const double score =
            single_metric(val.targets, scaler_sel.invert(pred_std), vmetric);
        if (!found || score < best_score) {
          best_score = score;
          result.chosen.lambda = lambda;
          found = true;
        }
      } catch (const std::exception& e) {
        failures.push_back({"lambda=" + fmt(lambda), e.what()});
      }
    }
    if (!found) throw_all_points_failed(failures);
    result.validation_score = best_score;

    if (audit) audit->set_phase(LeakAudit::Phase::fit);
    const auto t0 = std::chrono::steady_clock::now();
    const Standardizer scaler_fit = fit_standardizer(trainval);
    const ForecastPanel trainval_std = scaler_fit.apply(trainval);
    const Vector beta =
        ridge_fit(trainval_std.members, trainval_std.targets, result.chosen.lambda);
    result.fit_seconds = seconds_since(t0);

    if (audit) audit->set_phase(LeakAudit::Phase::evaluation);
    const ForecastPanel test_std = scaler_fit.apply(test);
    const Vector predictions = scaler_fit.invert(test_std.members * beta);
    if (audit) audit->set_phase(LeakAudit::Phase::scoring);
    result.test_report = evaluate(test.targets, predictions);
    result.predictions = predictions;
    return result;
  }

  // Adaptive ridge.
  std::vector<double> lambdas;
  for (double l : grid.lambda_grid) {
    if (options.adaptive_mode == SolveMode::faithful && l <= 0.0) continue;
    lambdas.push_back(l);
  }
  if (lambdas.empty())
    throw std::invalid_argument(
        "no usable lambda grid points (faithful mode excludes lambda = 0)");

  const Standardizer scaler_sel = fit_standardizer(train);
  const ForecastPanel train_std = scaler_sel.apply(train);
  const ForecastPanel val_std = scaler_sel.apply(val);

  SolveOptions solve_options = options.solve;
  solve_options.mode = options.adaptive_mode;

  double best_score = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;
  int best_window = 0;
  bool found = false;
  if (audit) audit->set_phase(LeakAudit::Phase::selection);
  for (int tau : grid.window_grid) {
    std::optional<AdaptiveFitProblem> problem;
    try {
      if (audit) audit->set_phase(LeakAudit::Phase::fit);
      problem.emplace(assemble_problem(train_std, tau, options.assemble));
    } catch (const std::exception& e) {
      failures.push_back({"tau=" + std::to_string(tau), e.what()});
      continue;
    }
    if (audit) audit->set_phase(LeakAudit::Phase::selection);
    const Matrix val_contexts =
        evaluation_contexts(val_std, layout.val_begin, tau, k, audit);
    for (double lambda : lambdas) {
      try {
        AdaptiveRule rule = solve_adaptive_ridge(*problem, lambda, solve_options);
        const Vector pred_std = rule_predictions(rule, val_std, val_contexts, nullptr);
        const double score =
            single_metric(val.targets, scaler_sel.invert(pred_std), vmetric);
        // Ties break toward the smaller lambda, then the smaller window.
        const bool better =
            !found || score < best_score ||
            (score == best_score &&
             (lambda < best_lambda || (lambda == best_lambda && tau < best_window)));
        if (better) {
          best_score = score;
          best_lambda = lambda;
          best_window = tau;
          found = true;
        }
      } catch (const std::exception& e) {
        failures.push_back(
            {"tau=" + std::to_string(tau) + ",lambda=" + fmt(lambda), e.what()});
      }
    }
  }
  if (!found) throw_all_points_failed(failures);
  result.chosen.lambda = best_lambda;
  result.chosen.window = best_window;
  result.validation_score = best_score;

  if (audit) audit->set_phase(LeakAudit::Phase::fit);
  const auto t0 = std::chrono::steady_clock::now();
  const Standardizer scaler_fit = fit_standardizer(trainval);
  const ForecastPanel trainval_std = scaler_fit.apply(trainval);
  const AdaptiveFitProblem final_problem =
      assemble_problem(trainval_std, best_window, options.assemble);
  AdaptiveRule rule =
      solve_adaptive_ridge(final_problem, best_lambda, solve_options,
                           &result.diagnostics);
  rule.scaler = scaler_fit;
  result.fit_seconds = seconds_since(t0);

  if (audit) audit->set_phase(LeakAudit::Phase::evaluation);
  const ForecastPanel test_std = scaler_fit.apply(test);
  const Matrix test_contexts =
      evaluation_contexts(test_std, test_begin, best_window, k, audit);
  Matrix* weights = options.collect_weights ? &result.weights : nullptr;
  const Vector pred_std = rule_predictions(rule, test_std, test_contexts, weights);
  const Vector predictions = scaler_fit.invert(pred_std);
  if (audit) audit->set_phase(LeakAudit::Phase::scoring);
  result.test_report = evaluate(test.targets, predictions);
  result.predictions = predictions;
  result.rule = std::move(rule);
  return result;
}

const char* name(CampaignAxis a) {
  switch (a) {
    case CampaignAxis::drift: return "drift";
    case CampaignAxis::members: return "members";
    case CampaignAxis::window: return "window";
    case CampaignAxis::train_size: return "train_size";
  }
  return "?";
}

CampaignAxis parse_axis(const std::string& s) {
  if (s == "drift") return CampaignAxis::drift;
  if (s == "members") return CampaignAxis::members;
  if (s == "window") return CampaignAxis::window;
  if (s == "train_size") return CampaignAxis::train_size;
  throw std::invalid_argument("unknown campaign axis '" + s + "'");
}

namespace {

SynthConfig cell_config(const ExperimentCampaign& campaign, double value,
                        std::uint64_t seed) {
  SynthConfig cfg = campaign.base;
  cfg.seed = seed;
  switch (campaign.axis) {
    case CampaignAxis::drift:
      if (cfg.drift == DriftKind::bernoulli) {
        cfg.p_drift = value;
      } else {
        cfg.drift = DriftKind::gaussian;
        cfg.sigma_drift = value;
        cfg.s_drift = value;
      }
      break;
    case CampaignAxis::members:
      cfg.members = static_cast<Index>(std::llround(value));
      break;
    case CampaignAxis::window:
    case CampaignAxis::train_size:
      break;
  }
  return cfg;
}

std::vector<CampaignRow> run_cell(const ExperimentCampaign& campaign,
                                  double value, std::uint64_t seed) {
  std::vector<CampaignRow> rows;
  for (Method method : campaign.methods) {
    CampaignRow row;
    row.value = value;
    row.seed = seed;
    row.method = method;
    rows.push_back(std::move(row));
  }
  auto fail_all = [&](const std::string& what) {
    for (auto& row : rows) {
      row.failed = true;
      row.error = what;
    }
    return rows;
  };

  ForecastPanel panel;
  BacktestOptions options;
  GridSpec grid = campaign.grid;
  try {
    const SynthConfig cfg = cell_config(campaign, value, seed);
    panel = generate_panel(cfg);

    options.split = campaign.split;
    options.adaptive_mode = campaign.adaptive_mode;
    options.assemble.allow_underdetermined = campaign.allow_underdetermined;

    if (campaign.axis == CampaignAxis::window) {
      grid.window_grid = {static_cast<int>(std::llround(value))};
    } else {
      grid.window_grid = {campaign.fixed_window};
    }

    if (campaign.axis == CampaignAxis::train_size) {
      // Fixed test window at the end; the requested number of train+val rows
      // immediately precedes it, one third of them used for validation.
      const Index n = panel.rows();
      const Index n_train_std = static_cast<Index>(
          std::llround(campaign.split.train_frac * static_cast<double>(n)));
      const Index n_val_std = static_cast<Index>(
          std::llround(campaign.split.val_frac * static_cast<double>(n)));
      const Index test_begin = n_train_std + n_val_std;
      const Index budget = static_cast<Index>(std::llround(value));
      if (budget < 3 || budget > test_begin)
        throw DataError("train size " + std::to_string(budget) +
                        " does not fit before the test window");
      const Index n_val =
          static_cast<Index>(std::llround(static_cast<double>(budget) / 3.0));
      const Index n_train = budget - n_val;
      panel = panel.slice(test_begin - budget, n);
      options.explicit_split = {{n_train, n_val}};
    }
  } catch (const std::exception& e) {
    return fail_all(e.what());
  }

  for (auto& row : rows) {
    try {
      const RunResult rr = run_backtest(panel, grid, row.method, options);
      row.report = rr.test_report;
      row.chosen = rr.chosen;
      row.fit_seconds = rr.fit_seconds;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  }
  return rows;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

std::vector<CampaignAggregate> aggregate_campaign(const std::vector<CampaignRow>& raw) {
  std::map<std::pair<double, int>, std::vector<const CampaignRow*>> groups;
  for (const auto& row : raw)
    if (!row.failed)
      groups[{row.value, static_cast<int>(row.method)}].push_back(&row);

  std::vector<CampaignAggregate> out;
  for (const auto& [key, rows] : groups) {
    CampaignAggregate agg;
    agg.value = key.first;
    agg.method = static_cast<Method>(key.second);
    agg.n = static_cast<int>(rows.size());
    auto accumulate = [&](auto select) {
      double mean = 0.0;
      for (const auto* r : rows) mean += select(r->report);
      mean /= static_cast<double>(rows.size());
      double ss = 0.0;
      for (const auto* r : rows) {
        const double d = select(r->report) - mean;
        ss += d * d;
      }
      const double sd =
          rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
      return std::pair<double, double>(mean, sd);
    };
    std::tie(agg.mean.mae, agg.stddev.mae) =
        accumulate([](const MetricsReport& r) { return r.mae; });
    std::tie(agg.mean.rmse, agg.stddev.rmse) =
        accumulate([](const MetricsReport& r) { return r.rmse; });
    std::tie(agg.mean.mape_percent, agg.stddev.mape_percent) =
        accumulate([](const MetricsReport& r) { return r.mape_percent; });
    std::tie(agg.mean.cvar05, agg.stddev.cvar05) =
        accumulate([](const MetricsReport& r) { return r.cvar05; });
    std::tie(agg.mean.cvar15, agg.stddev.cvar15) =
        accumulate([](const MetricsReport& r) { return r.cvar15; });
    agg.mean.n_cases = rows.front()->report.n_cases;
    out.push_back(agg);
  }
  return out;
}

CampaignResult run_campaign(const ExperimentCampaign& campaign) {
  if (campaign.values.empty()) throw std::invalid_argument("campaign has no values");
  if (campaign.seeds.empty()) throw std::invalid_argument("campaign has no seeds");
  if (campaign.methods.empty()) throw std::invalid_argument("campaign has no methods");

  struct Cell {
    double value;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double value : campaign.values)
    for (std::uint64_t seed : campaign.seeds) cells.push_back({value, seed});

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = campaign.workers > 0
                               ? static_cast<unsigned>(campaign.workers)
                               : std::min<unsigned>(hw, static_cast<unsigned>(cells.size()));

  std::vector<CampaignRow> raw;
  std::mutex raw_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      auto rows = run_cell(campaign, cells[i].value, cells[i].seed);
      std::lock_guard<std::mutex> lock(raw_mutex);
      for (auto& r : rows) raw.push_back(std::move(r));
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(raw.begin(), raw.end(), [](const CampaignRow& a, const CampaignRow& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.method != b.method) return a.method < b.method;
    return a.seed < b.seed;
  });

  CampaignResult result;
  result.raw = std::move(raw);
  result.aggregates = aggregate_campaign(result.raw);
  for (const auto& row : result.raw)
    if (row.failed) ++result.failures;
  return result;
}

std::string CampaignResult::raw_csv() const {
  // Wall-clock timings live in timing.csv only, so this file is
  // byte-reproducible under identical seeds.
  std::string s =
      "value,seed,method," + MetricsReport::csv_header() + ",failed,error\n";
  for (const auto& r : raw) {
    s += fmt(r.value) + "," + std::to_string(r.seed) + "," + name(r.method) + ",";
    s += r.failed ? ",,,,,," : (r.report.csv_row() + ",");
    s += r.failed ? "1," + sanitize(r.error) : "0,";
    s += "\n";
  }
  return s;
}

std::string CampaignResult::results_csv() const {
  std::string s =
      "value,method,n,mae_mean,mae_std,rmse_mean,rmse_std,mape_mean,mape_std,"
      "cvar05_mean,cvar05_std,cvar15_mean,cvar15_std\n";
  for (const auto& a : aggregates) {
    s += fmt(a.value) + "," + name(a.method) + "," + std::to_string(a.n);
    s += "," + fmt(a.mean.mae) + "," + fmt(a.stddev.mae);
    s += "," + fmt(a.mean.rmse) + "," + fmt(a.stddev.rmse);
    s += "," + fmt(a.mean.mape_percent) + "," + fmt(a.stddev.mape_percent);
    s += "," + fmt(a.mean.cvar05) + "," + fmt(a.stddev.cvar05);
    s += "," + fmt(a.mean.cvar15) + "," + fmt(a.stddev.cvar15);
    s += "\n";
  }
  return s;
}

std::string CampaignResult::chosen_params_json() const {
  std::string s = "[";
  bool first = true;
  for (const auto& r : raw) {
    if (r.failed) continue;
    if (!first) s += ",";
    s += "\n  {\"value\":" + fmt(r.value) + ",\"seed\":" + std::to_string(r.seed) +
         ",\"method\":\"" + name(r.method) + "\",\"params\":" + r.chosen.json(r.method) + "}";
    first = false;
  }
  s += "\n]\n";
  return s;
}

std::string CampaignResult::timing_csv() const {
  std::string s = "value,seed,method,fit_seconds\n";
  for (const auto& r : raw) {
    if (r.failed) continue;
    s += fmt(r.value) + "," + std::to_string(r.seed) + "," + name(r.method) + "," +
         fmt(r.fit_seconds) + "\n";
  }
  return s;
}

TimingPoint timing_probe(const SynthConfig& cfg, Index train_rows, int window,
                         SolveMode mode, double lambda) {
  SynthConfig gen = cfg;
  gen.horizon = train_rows;
  const ForecastPanel panel = generate_panel(gen);
  const Standardizer scaler = fit_standardizer(panel);
  const ForecastPanel std_panel = scaler.apply(panel);

  TimingPoint point;
  point.train_rows = train_rows;
  point.members = cfg.members;
  point.window = window;
  point.mode = mode;

  AssembleOptions assemble;
  assemble.allow_underdetermined = true;
  const auto t0 = std::chrono::steady_clock::now();
  const AdaptiveFitProblem problem = assemble_problem(std_panel, window, assemble);
  point.assemble_seconds = seconds_since(t0);

  SolveOptions options;
  options.mode = mode;
  const auto t1 = std::chrono::steady_clock::now();
  solve_adaptive_ridge(problem, lambda, options);
  point.solve_seconds = seconds_since(t1);
  return point;
}

}  // namespace adaptens
