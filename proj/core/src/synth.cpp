#include "adaptens/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace adaptens {

namespace {

enum Stage : std::uint64_t {
  kTruth = 1,
  kMemberParams = 2,
  kMemberNoise = 3,
  kGaussParams = 4,
  kGaussNoise = 5,
  kGate = 6,
  kBernParams = 7,
  kBernNoise = 8,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, stage, member).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stage,
                            std::uint64_t member = 0) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ (stage << 32)) + member));
}

double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double draw_normal(std::mt19937_64& rng, double mean, double sd) {
  if (sd == 0.0) return mean;
  return std::normal_distribution<double>(mean, sd)(rng);
}

}  // namespace

const char* name(DriftKind kind) {
  switch (kind) {
    case DriftKind::none: return "none";
    case DriftKind::gaussian: return "gaussian";
    case DriftKind::bernoulli: return "bernoulli";
  }
  return "?";
}

DriftKind parse_drift_kind(const std::string& s) {
  if (s == "none") return DriftKind::none;
  if (s == "gaussian") return DriftKind::gaussian;
  if (s == "bernoulli") return DriftKind::bernoulli;
  throw std::invalid_argument("unknown drift kind '" + s + "'");
}

void SynthConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (members < 1) throw std::invalid_argument("member count must be >= 1");
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  if (noise_sd < 0.0) throw std::invalid_argument("noise_sd must be >= 0");
  if (bias_min > bias_max || sd_min > sd_max)
    throw std::invalid_argument("member error ranges must be well ordered");
  if (sigma_drift < 0.0 || sigma_drift > 1.0 || s_drift < 0.0 || s_drift > 1.0)
    throw std::invalid_argument("drift scales must lie in [0,1]");
  if (p_drift < 0.0 || p_drift > 1.0)
    throw std::invalid_argument("p_drift must lie in [0,1]");
}

Vector gen_ground_truth(const SynthConfig& cfg) {
  cfg.validate();
  auto rng = make_stream(cfg.seed, kTruth);
  Vector y(cfg.horizon);
  const double omega = 2.0 * std::numbers::pi / cfg.period;
  for (Index t = 0; t < cfg.horizon; ++t)
    y(t) = std::sin(omega * static_cast<double>(t + 1)) +
           draw_normal(rng, 0.0, cfg.noise_sd);
  return y;
}

MemberParams draw_member_params(const SynthConfig& cfg) {
  cfg.validate();
  MemberParams p{Vector(cfg.members), Vector(cfg.members)};
  for (Index k = 0; k < cfg.members; ++k) {
    auto rng = make_stream(cfg.seed, kMemberParams, static_cast<std::uint64_t>(k));
    p.bias(k) = draw_uniform(rng, cfg.bias_min, cfg.bias_max);
    p.sd(k) = draw_uniform(rng, cfg.sd_min, cfg.sd_max);
  }
  return p;
}

Matrix gen_members(const SynthConfig& cfg, const Vector& truth) {
  cfg.validate();
  if (truth.size() != cfg.horizon)
    throw std::invalid_argument("truth length does not match configured horizon");
  const MemberParams p = draw_member_params(cfg);
  Matrix x(cfg.horizon, cfg.members);
  for (Index k = 0; k < cfg.members; ++k) {
    auto rng = make_stream(cfg.seed, kMemberNoise, static_cast<std::uint64_t>(k));
    // The sd draw can be negative; its magnitude acts as the deviation.
    const double sd = std::abs(p.sd(k));
    for (Index t = 0; t < cfg.horizon; ++t)
      x(t, k) = truth(t) + draw_normal(rng, p.bias(k), sd);
  }
  return x;
}

Matrix add_gaussian_drift(const SynthConfig& cfg, const Matrix& members) {
  cfg.validate();
  const Index n = members.rows();
  Matrix x = members;
  for (Index k = 0; k < members.cols(); ++k) {
    auto prng = make_stream(cfg.seed, kGaussParams, static_cast<std::uint64_t>(k));
    const double bias = draw_normal(prng, 0.0, cfg.sigma_drift);
    const double sd = draw_uniform(prng, 0.0, cfg.s_drift);
    auto rng = make_stream(cfg.seed, kGaussNoise, static_cast<std::uint64_t>(k));
    for (Index t = 0; t < n; ++t)
      x(t, k) += drift_ramp(t + 1, cfg.horizon) * draw_normal(rng, bias, sd);
  }
  return x;
}

Matrix add_bernoulli_drift(const SynthConfig& cfg, const Matrix& members) {
  cfg.validate();
  const Index n = members.rows();
  Matrix x = members;
  for (Index k = 0; k < members.cols(); ++k) {
    auto prng = make_stream(cfg.seed, kBernParams, static_cast<std::uint64_t>(k));
    const double bias = draw_normal(prng, 0.0, 0.5);
    const double sd = draw_uniform(prng, 0.0, 0.5);
    auto gate = make_stream(cfg.seed, kGate, static_cast<std::uint64_t>(k));
    auto rng = make_stream(cfg.seed, kBernNoise, static_cast<std::uint64_t>(k));
    std::bernoulli_distribution hit(cfg.p_drift);
    for (Index t = 0; t < n; ++t) {
      // Draw the drift term unconditionally so the gate probability does not
      // shift the remaining stream.
      const double drift = draw_normal(rng, bias, sd);
      if (cfg.p_drift > 0.0 && hit(gate)) x(t, k) += drift;
    }
  }
  return x;
}

ForecastPanel generate_panel(const SynthConfig& cfg, int lead_time) {
  const Vector truth = gen_ground_truth(cfg);
  Matrix members = gen_members(cfg, truth);
  switch (cfg.drift) {
    case DriftKind::none: break;
    case DriftKind::gaussian: members = add_gaussian_drift(cfg, members); break;
    case DriftKind::bernoulli: members = add_bernoulli_drift(cfg, members); break;
  }
  ForecastPanel panel;
  panel.timestamps.resize(static_cast<std::size_t>(cfg.horizon));
  for (Index t = 0; t < cfg.horizon; ++t)
    panel.timestamps[static_cast<std::size_t>(t)] = t + 1;
  panel.members = std::move(members);
  panel.targets = truth;
  panel.member_names.reserve(static_cast<std::size_t>(cfg.members));
  for (Index k = 0; k < cfg.members; ++k)
    panel.member_names.push_back("m" + std::to_string(k + 1));
  panel.lead_time = lead_time;
  panel.check();
  return panel;
}

}  // namespace adaptens
