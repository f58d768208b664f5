#include <CLI11.hpp>
#include <iostream>

#include "adaptens/errors.hpp"
#include "adaptens/metrics.hpp"
#include "commands.hpp"
#include "helpers.hpp"

namespace cli = adaptens::cli;

namespace {

void add_synth_flags(CLI::App* cmd, cli::SynthFlags& f) {
  cmd->add_option("--T", f.horizon, "Number of time steps");
  cmd->add_option("--m", f.members, "Number of ensemble members");
  cmd->add_option("--period", f.period, "Sine period in steps");
  cmd->add_option("--noise-sd", f.noise_sd, "Ground-truth noise deviation");
  cmd->add_option("--bias-min", f.bias_min, "Member bias range lower end");
  cmd->add_option("--bias-max", f.bias_max, "Member bias range upper end");
  cmd->add_option("--sd-min", f.sd_min, "Member deviation draw lower end");
  cmd->add_option("--sd-max", f.sd_max, "Member deviation draw upper end");
  cmd->add_option("--drift", f.drift, "Drift kind: none, gaussian, bernoulli");
  cmd->add_option("--sigma-drift", f.sigma_drift, "Gaussian drift bias scale");
  cmd->add_option("--s-drift", f.s_drift, "Gaussian drift deviation cap");
  cmd->add_option("--p-drift", f.p_drift, "Bernoulli drift gate probability");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--lead-time", f.lead_time, "Forecast lead time in steps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptens: adaptive robust forecast ensembles"};
  app.set_config("--config", "", "Read options from a key=value (TOML-like) file");
  app.require_subcommand(1);

  cli::SynthCommand synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic forecast panel");
  add_synth_flags(synth_cmd, synth.synth);
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  cli::BacktestCommand backtest;
  CLI::App* backtest_cmd =
      app.add_subcommand("backtest", "Train, validate and test ensemblers on a panel");
  backtest_cmd->add_option("--input", backtest.input, "Panel CSV")->required();
  backtest_cmd->add_option("--out", backtest.out, "Output directory")->required();
  backtest_cmd->add_option("--timestamp-col", backtest.timestamp_col, "Timestamp column");
  backtest_cmd->add_option("--target-col", backtest.target_col, "Target column");
  backtest_cmd->add_option("--series-col", backtest.series_col, "Series label column");
  backtest_cmd->add_option("--members", backtest.member_cols,
                           "Member columns (comma list; default: all others)");
  backtest_cmd->add_option("--lead-time", backtest.lead_time, "Lead time k in steps");
  backtest_cmd->add_option("--methods", backtest.methods,
                           "Comma list of methods or 'all'");
  backtest_cmd->add_option("--mode", backtest.mode,
                           "Adaptive solver mode: faithful or squared");
  backtest_cmd->add_option("--train-frac", backtest.train_frac, "Training fraction");
  backtest_cmd->add_option("--val-frac", backtest.val_frac, "Validation fraction");
  backtest_cmd->add_option("--lambda-grid", backtest.lambda_grid, "Lambda grid");
  backtest_cmd->add_option("--window-grid", backtest.window_grid,
                           "Adaptive window grid (list or a-b range)");
  backtest_cmd->add_option("--exp3-grid", backtest.exp3_grid, "Exp3 window grid");
  backtest_cmd->add_option("--pa-grid", backtest.pa_grid, "PA margin grid");
  backtest_cmd->add_option("--metric", backtest.metric, "Validation metric");
  backtest_cmd->add_flag("--emit-weights", backtest.emit_weights,
                         "Write per-step coefficient traces");
  backtest_cmd->add_flag("--allow-underdetermined", backtest.allow_underdetermined,
                         "Permit fewer training rows than parameters");

  cli::CampaignCommand campaign;
  CLI::App* campaign_cmd =
      app.add_subcommand("campaign", "Seed-replicated synthetic experiments");
  add_synth_flags(campaign_cmd, campaign.synth);
  campaign_cmd->add_option("--out", campaign.out, "Output directory")->required();
  campaign_cmd->add_option("--vary", campaign.vary,
                           "Axis: drift, members, window, train_size")->required();
  campaign_cmd->add_option("--values", campaign.values, "Axis values (comma list)")
      ->required();
  campaign_cmd->add_option("--seeds", campaign.seeds, "Number of seeds")->required();
  campaign_cmd->add_option("--seed-base", campaign.seed_base, "First seed value");
  campaign_cmd->add_option("--methods", campaign.methods, "Methods to run");
  campaign_cmd->add_option("--mode", campaign.mode, "Adaptive solver mode");
  campaign_cmd->add_option("--fixed-window", campaign.fixed_window,
                           "Adaptive window when the axis does not vary it");
  campaign_cmd->add_option("--train-frac", campaign.train_frac, "Training fraction");
  campaign_cmd->add_option("--val-frac", campaign.val_frac, "Validation fraction");
  campaign_cmd->add_option("--lambda-grid", campaign.lambda_grid, "Lambda grid");
  campaign_cmd->add_option("--exp3-grid", campaign.exp3_grid, "Exp3 window grid");
  campaign_cmd->add_option("--pa-grid", campaign.pa_grid, "PA margin grid");
  campaign_cmd->add_option("--metric", campaign.metric, "Validation metric");
  campaign_cmd->add_option("--workers", campaign.workers,
                           "Worker threads (0: hardware)");
  campaign_cmd->add_flag("--allow-failures", campaign.allow_failures,
                         "Exit 0 even when some cells fail");

  cli::VerifyCommand verify;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Check the worst-case/regularization equivalence numerically");
  verify_cmd->add_option("--norms", verify.norms,
                         "'p,q' (loss, regularizer), 'f2', or 'all'");
  verify_cmd->add_option("--seeds", verify.seeds, "Number of random instances");
  verify_cmd->add_option("--samples", verify.samples,
                         "Sampled feasible perturbations per instance");
  verify_cmd->add_option("--out", verify.out, "Optional output directory");

  cli::ReportCommand report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Recompute campaign aggregates and plots");
  report_cmd->add_option("--input", report.input,
                         "Campaign directory or raw.csv path")->required();
  report_cmd->add_option("--out", report.out, "Output directory")->required();
  report_cmd->add_flag("--svg", report.svg, "Emit per-metric SVG line charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  try {
    if (synth_cmd->parsed()) return cli::cmd_synth(synth);
    if (backtest_cmd->parsed()) return cli::cmd_backtest(backtest);
    if (campaign_cmd->parsed()) return cli::cmd_campaign(campaign);
    if (verify_cmd->parsed()) return cli::cmd_verify(verify);
    if (report_cmd->parsed()) return cli::cmd_report(report);
  } catch (const adaptens::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return cli::kNumerical;
  } catch (const adaptens::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return cli::kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kNumerical;
  }
  return cli::kUsage;
}
