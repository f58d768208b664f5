#include <iostream>

#include "adaptens/panel.hpp"
#include "commands.hpp"
#include "helpers.hpp"
#include "manifest.hpp"

namespace adaptens::cli {

SynthConfig SynthFlags::to_config() const {
  SynthConfig cfg;
  cfg.horizon = horizon;
  cfg.members = members;
  cfg.period = period;
  cfg.noise_sd = noise_sd;
  cfg.bias_min = bias_min;
  cfg.bias_max = bias_max;
  cfg.sd_min = sd_min;
  cfg.sd_max = sd_max;
  cfg.drift = parse_drift_kind(drift);
  cfg.sigma_drift = sigma_drift;
  cfg.s_drift = s_drift;
  cfg.p_drift = p_drift;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

namespace {

void fill_synth_config(const SynthFlags& f, RunManifest& manifest) {
  manifest.config["T"] = std::to_string(f.horizon);
  manifest.config["m"] = std::to_string(f.members);
  manifest.config["period"] = fmt(f.period);
  manifest.config["noise_sd"] = fmt(f.noise_sd);
  manifest.config["bias_min"] = fmt(f.bias_min);
  manifest.config["bias_max"] = fmt(f.bias_max);
  manifest.config["sd_min"] = fmt(f.sd_min);
  manifest.config["sd_max"] = fmt(f.sd_max);
  manifest.config["drift"] = f.drift;
  manifest.config["sigma_drift"] = fmt(f.sigma_drift);
  manifest.config["s_drift"] = fmt(f.s_drift);
  manifest.config["p_drift"] = fmt(f.p_drift);
  manifest.config["seed"] = std::to_string(f.seed);
  manifest.config["lead_time"] = std::to_string(f.lead_time);
}

}  // namespace

int cmd_synth(const SynthCommand& cmd) {
  const SynthConfig cfg = cmd.synth.to_config();
  const ForecastPanel panel = generate_panel(cfg, cmd.synth.lead_time);

  const auto dir = ensure_out_dir(cmd.out);
  save_panel(panel, dir / "panel.csv");

  RunManifest manifest;
  manifest.command = "synth";
  manifest.version = ADAPTENS_VERSION;
  manifest.seeds = {cfg.seed};
  fill_synth_config(cmd.synth, manifest);
  manifest.outputs = {"panel.csv"};
  manifest.write(dir);

  std::cout << "wrote " << (dir / "panel.csv").string() << " (" << panel.rows()
            << " rows, " << panel.member_count() << " members)\n";
  return kOk;
}

}  // namespace adaptens::cli
