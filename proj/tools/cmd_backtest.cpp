#include <cstdio>
#include <iostream>

#include "adaptens/pipeline.hpp"
#include "commands.hpp"
#include "helpers.hpp"
#include "manifest.hpp"

namespace adaptens::cli {

namespace {

std::string weights_csv(const ForecastPanel& test,
                        const std::vector<std::string>& names, const Matrix& w) {
  std::string s = "timestamp";
  for (const auto& n : names) s += "," + n;
  s += "\n";
  for (Index t = 0; t < w.rows(); ++t) {
    s += std::to_string(test.timestamps[static_cast<std::size_t>(t)]);
    for (Index j = 0; j < w.cols(); ++j) s += "," + fmt(w(t, j));
    s += "\n";
  }
  return s;
}

}  // namespace

int cmd_backtest(const BacktestCommand& cmd) {
  CsvSchema schema;
  schema.timestamp_col = cmd.timestamp_col;
  schema.target_col = cmd.target_col;
  schema.series_col = cmd.series_col;
  if (!cmd.member_cols.empty()) schema.member_cols = split_csv(cmd.member_cols);
  const ForecastPanel panel = load_panel(cmd.input, schema, cmd.lead_time);

  GridSpec grid;
  grid.lambda_grid = parse_double_list(cmd.lambda_grid);
  grid.window_grid = parse_int_list(cmd.window_grid);
  grid.exp3_window_grid = parse_int_list(cmd.exp3_grid);
  grid.pa_margin_grid = parse_double_list(cmd.pa_grid);
  grid.validation_metric = parse_metric(cmd.metric);

  BacktestOptions options;
  options.split = SplitSpec{cmd.train_frac, cmd.val_frac};
  options.adaptive_mode = parse_solve_mode(cmd.mode);
  options.assemble.allow_underdetermined = cmd.allow_underdetermined;
  options.collect_weights = cmd.emit_weights;

  const std::vector<Method> methods = parse_method_list(cmd.methods);
  const auto dir = ensure_out_dir(cmd.out);
  const auto splits = split_chronological(panel, options.split);

  std::string table = "method," + MetricsReport::csv_header() + "\n";
  std::string chosen = "{";
  std::vector<std::string> outputs = {"metrics.csv", "chosen_params.json"};
  bool first = true;

  std::printf("%-16s %10s %10s %10s %10s %10s\n", "method", "mae", "rmse",
              "mape%", "cvar5", "cvar15");
  for (Method method : methods) {
    const RunResult rr = run_backtest(panel, grid, method, options);
    table += std::string(name(method)) + "," + rr.test_report.csv_row() + "\n";
    if (!first) chosen += ",";
    chosen += std::string("\n  \"") + name(method) +
              "\":" + rr.chosen.json(method);
    first = false;
    std::printf("%-16s %10.4f %10.4f %10.2f %10.4f %10.4f\n", name(method),
                rr.test_report.mae, rr.test_report.rmse,
                rr.test_report.mape_percent, rr.test_report.cvar05,
                rr.test_report.cvar15);

    if (cmd.emit_weights && rr.weights.rows() > 0) {
      const std::string file = std::string("weights_") + name(method) + ".csv";
      write_file(dir / file, weights_csv(splits.test, panel.member_names, rr.weights));
      outputs.push_back(file);
    }
    if (rr.rule) {
      write_file(dir / "rule_adaptive_ridge.json", rr.rule->to_json());
      outputs.push_back("rule_adaptive_ridge.json");
    }
  }
  chosen += "\n}\n";
  write_file(dir / "metrics.csv", table);
  write_file(dir / "chosen_params.json", chosen);

  RunManifest manifest;
  manifest.command = "backtest";
  manifest.version = ADAPTENS_VERSION;
  manifest.input_digests[cmd.input] = file_digest(cmd.input);
  manifest.config = {
      {"input", cmd.input},
      {"timestamp_col", cmd.timestamp_col},
      {"target_col", cmd.target_col},
      {"series_col", cmd.series_col},
      {"member_cols", cmd.member_cols},
      {"lead_time", std::to_string(cmd.lead_time)},
      {"methods", cmd.methods},
      {"mode", cmd.mode},
      {"train_frac", fmt(cmd.train_frac)},
      {"val_frac", fmt(cmd.val_frac)},
      {"lambda_grid", cmd.lambda_grid},
      {"window_grid", cmd.window_grid},
      {"exp3_grid", cmd.exp3_grid},
      {"pa_grid", cmd.pa_grid},
      {"metric", cmd.metric},
      {"emit_weights", cmd.emit_weights ? "true" : "false"},
      {"allow_underdetermined", cmd.allow_underdetermined ? "true" : "false"},
  };
  manifest.outputs = outputs;
  manifest.write(dir);
  return kOk;
}

}  // namespace adaptens::cli
