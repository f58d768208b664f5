#pragma once

#include <cstdint>
#include <string>

#include "adaptens/synth.hpp"

namespace adaptens::cli {

struct SynthFlags {
  std::int64_t horizon = 4000;
  std::int64_t members = 10;
  double period = 500.0;
  double noise_sd = 0.1;
  double bias_min = -0.5, bias_max = 0.5;
  double sd_min = -0.5, sd_max = 0.5;
  std::string drift = "none";
  double sigma_drift = 0.0;
  double s_drift = 0.0;
  double p_drift = 0.0;
  std::uint64_t seed = 0;
  int lead_time = 1;

  SynthConfig to_config() const;
};

struct SynthCommand {
  SynthFlags synth;
  std::string out;
};
int cmd_synth(const SynthCommand& cmd);

struct BacktestCommand {
  std::string input;
  std::string out;
  std::string timestamp_col = "timestamp";
  std::string target_col = "target";
  std::string series_col;
  std::string member_cols;  // comma list; empty = every remaining column
  int lead_time = 1;
  std::string methods = "all";
  std::string mode = "faithful";
  double train_frac = 0.5;
  double val_frac = 0.25;
  std::string lambda_grid = "0,1e-4,1e-3,1e-2,1e-1,1,2";
  std::string window_grid = "1-10";
  std::string exp3_grid = "1-10";
  std::string pa_grid = "0,1e-4,1e-3,1e-2,1e-1,1,2";
  std::string metric = "mae";
  bool emit_weights = false;
  bool allow_underdetermined = false;
};
int cmd_backtest(const BacktestCommand& cmd);

struct CampaignCommand {
  SynthFlags synth;
  std::string out;
  std::string vary;
  std::string values;
  std::int64_t seeds = 0;  // required count
  std::uint64_t seed_base = 1;
  std::string methods = "all";
  std::string mode = "faithful";
  int fixed_window = 5;
  double train_frac = 0.5;
  double val_frac = 0.25;
  std::string lambda_grid = "0,1e-4,1e-3,1e-2,1e-1,1,2";
  std::string exp3_grid = "1-10";
  std::string pa_grid = "0,1e-4,1e-3,1e-2,1e-1,1,2";
  std::string metric = "mae";
  int workers = 0;
  bool allow_failures = false;
};
int cmd_campaign(const CampaignCommand& cmd);

struct VerifyCommand {
  std::string norms = "all";  // "l2,l2" | "l2,l1" | "f2" | "all"
  std::int64_t seeds = 20;
  int samples = 10000;
  std::string out;  // optional
};
int cmd_verify(const VerifyCommand& cmd);

struct ReportCommand {
  std::string input;  // campaign output directory or raw.csv path
  std::string out;
  bool svg = false;
};
int cmd_report(const ReportCommand& cmd);

}  // namespace adaptens::cli
