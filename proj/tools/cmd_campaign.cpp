#include <iostream>

#include "adaptens/pipeline.hpp"
#include "commands.hpp"
#include "helpers.hpp"
#include "manifest.hpp"

namespace adaptens::cli {

int cmd_campaign(const CampaignCommand& cmd) {
  if (cmd.seeds < 1)
    throw std::invalid_argument("--seeds is required in campaign mode");

  ExperimentCampaign campaign;
  campaign.base = cmd.synth.to_config();
  campaign.axis = parse_axis(cmd.vary);
  campaign.values = parse_double_list(cmd.values);
  for (std::int64_t i = 0; i < cmd.seeds; ++i)
    campaign.seeds.push_back(cmd.seed_base + static_cast<std::uint64_t>(i));
  campaign.methods = parse_method_list(cmd.methods);
  campaign.grid.lambda_grid = parse_double_list(cmd.lambda_grid);
  campaign.grid.exp3_window_grid = parse_int_list(cmd.exp3_grid);
  campaign.grid.pa_margin_grid = parse_double_list(cmd.pa_grid);
  campaign.grid.validation_metric = parse_metric(cmd.metric);
  campaign.split = SplitSpec{cmd.train_frac, cmd.val_frac};
  campaign.adaptive_mode = parse_solve_mode(cmd.mode);
  campaign.fixed_window = cmd.fixed_window;
  campaign.workers = cmd.workers;

  const CampaignResult result = run_campaign(campaign);

  const auto dir = ensure_out_dir(cmd.out);
  write_file(dir / "results.csv", result.results_csv());
  write_file(dir / "raw.csv", result.raw_csv());
  write_file(dir / "chosen_params.json", result.chosen_params_json());
  write_file(dir / "timing.csv", result.timing_csv());

  RunManifest manifest;
  manifest.command = "campaign";
  manifest.version = ADAPTENS_VERSION;
  manifest.seeds = campaign.seeds;
  manifest.config = {
      {"vary", cmd.vary},
      {"values", cmd.values},
      {"seeds", std::to_string(cmd.seeds)},
      {"seed_base", std::to_string(cmd.seed_base)},
      {"methods", cmd.methods},
      {"mode", cmd.mode},
      {"fixed_window", std::to_string(cmd.fixed_window)},
      {"train_frac", fmt(cmd.train_frac)},
      {"val_frac", fmt(cmd.val_frac)},
      {"lambda_grid", cmd.lambda_grid},
      {"exp3_grid", cmd.exp3_grid},
      {"pa_grid", cmd.pa_grid},
      {"metric", cmd.metric},
      {"T", std::to_string(cmd.synth.horizon)},
      {"m", std::to_string(cmd.synth.members)},
      {"drift", cmd.synth.drift},
      {"allow_failures", cmd.allow_failures ? "true" : "false"},
  };
  manifest.outputs = {"results.csv", "raw.csv", "chosen_params.json", "timing.csv"};
  manifest.write(dir);

  std::cout << result.results_csv();
  if (result.failures > 0) {
    std::cerr << result.failures << " cell(s) failed; see raw.csv\n";
    if (!cmd.allow_failures) return kData;
  }
  return kOk;
}

}  // namespace adaptens::cli
