#pragma once

#include <cstdint>

#include "adaptens/panel.hpp"

namespace adaptens {

enum class DriftKind { none, gaussian, bernoulli };

const char* name(DriftKind kind);
DriftKind parse_drift_kind(const std::string& s);

/// Configuration of the synthetic forecasting laboratory: a noisy sinusoidal
/// ground truth, per-member error laws drawn once per experiment, and an
/// optional drift process layered on top. The seed fully determines the
/// output; member streams are independent, so adding members never perturbs
/// the draws of earlier members.
struct SynthConfig {
  Index horizon = 4000;  // T
  Index members = 10;    // m
  double period = 500.0;
  double noise_sd = 0.1;
  double bias_min = -0.5, bias_max = 0.5;  // member error bias ~ Uniform
  double sd_min = -0.5, sd_max = 0.5;      // member error sd draw ~ Uniform
  DriftKind drift = DriftKind::none;
  double sigma_drift = 0.0;  // gaussian drift: per-member bias ~ N(0, sigma_drift)
  double s_drift = 0.0;      // gaussian drift: per-member sd ~ Uniform(0, s_drift)
  double p_drift = 0.0;      // bernoulli drift: gate probability per step
  std::uint64_t seed = 0;

  void validate() const;
};

// Ground truth y(t) = sin(2*pi*t/period) + N(0, noise_sd), t = 1..T.
Vector gen_ground_truth(const SynthConfig& cfg);

// Per-member error law draws; the same values gen_members uses internally.
struct MemberParams {
  Vector bias;  // b_k
  Vector sd;    // raw Uniform draw; |sd| is used as the standard deviation
};
MemberParams draw_member_params(const SynthConfig& cfg);

// Member k forecasts truth + N(b_k, |sd_k|) noise.
Matrix gen_members(const SynthConfig& cfg, const Vector& truth);

// Linear ramp multiplier applied to the gaussian drift term.
inline double drift_ramp(Index t, Index horizon) {
  return static_cast<double>(t) / static_cast<double>(horizon);
}

// X_k(t) = members_k(t) + (t/T) * N(b'_k, sd'_k), b'_k ~ N(0, sigma_drift),
// sd'_k ~ Uniform(0, s_drift).
Matrix add_gaussian_drift(const SynthConfig& cfg, const Matrix& members);

// X_k(t) = members_k(t) + Bernoulli(p_drift) * N(b'_k, sd'_k) with
// b'_k ~ N(0, 0.5) and sd'_k ~ Uniform(0, 0.5).
Matrix add_bernoulli_drift(const SynthConfig& cfg, const Matrix& members);

// Full panel: ground truth, members, configured drift; timestamps 1..T.
ForecastPanel generate_panel(const SynthConfig& cfg, int lead_time = 1);

}  // namespace adaptens
