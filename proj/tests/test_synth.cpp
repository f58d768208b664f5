#include <doctest.h>

#include <cmath>

#include "adaptens/synth.hpp"

using namespace adaptens;

TEST_CASE("noiseless sine hits the grid values") {
  SynthConfig cfg;
  cfg.horizon = 500;
  cfg.noise_sd = 0.0;
  cfg.members = 1;
  const Vector y = gen_ground_truth(cfg);
  // t runs 1..T, so y(250) sits at index 249.
  CHECK(std::abs(y(249)) < 1e-12);               // sin(pi)
  CHECK(y(124) == doctest::Approx(1.0).epsilon(1e-12));  // sin(pi/2)
}

TEST_CASE("ground truth is deterministic under a fixed seed") {
  SynthConfig cfg;
  cfg.seed = 42;
  cfg.horizon = 256;
  const Vector a = gen_ground_truth(cfg);
  const Vector b = gen_ground_truth(cfg);
  CHECK(a == b);
}

TEST_CASE("member params repeat under the same seed") {
  SynthConfig cfg;
  cfg.seed = 7;
  const MemberParams a = draw_member_params(cfg);
  const MemberParams b = draw_member_params(cfg);
  CHECK(a.bias == b.bias);
  CHECK(a.sd == b.sd);
}

TEST_CASE("adding members never perturbs earlier members") {
  SynthConfig small;
  small.seed = 3;
  small.horizon = 128;
  small.members = 5;
  SynthConfig big = small;
  big.members = 9;
  const ForecastPanel a = generate_panel(small);
  const ForecastPanel b = generate_panel(big);
  CHECK(a.members == b.members.leftCols(5));
}

TEST_CASE("collapsed ranges give a pure bias member") {
  SynthConfig cfg;
  cfg.horizon = 64;
  cfg.members = 2;
  cfg.noise_sd = 0.0;
  cfg.bias_min = cfg.bias_max = 0.3;
  cfg.sd_min = cfg.sd_max = 0.0;
  const Vector y = gen_ground_truth(cfg);
  const Matrix x = gen_members(cfg, y);
  const Vector shifted = (y.array() + 0.3).matrix();  // same op order as the generator
  CHECK((x.colwise() - shifted).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("member error moments pass the CLT check") {
  SynthConfig cfg;
  cfg.seed = 12;
  cfg.horizon = 4000;
  cfg.members = 10;
  const Vector y = gen_ground_truth(cfg);
  const Matrix x = gen_members(cfg, y);
  const MemberParams p = draw_member_params(cfg);
  for (Index k = 0; k < cfg.members; ++k) {
    const double empirical = (x.col(k) - y).mean();
    const double bound =
        3.0 * std::abs(p.sd(k)) / std::sqrt(static_cast<double>(cfg.horizon));
    CHECK(std::abs(empirical - p.bias(k)) <= bound + 1e-12);
  }
}

TEST_CASE("with all noise and drift at zero, members equal the truth") {
  SynthConfig cfg;
  cfg.horizon = 200;
  cfg.members = 3;
  cfg.noise_sd = 0.0;
  cfg.bias_min = cfg.bias_max = 0.0;
  cfg.sd_min = cfg.sd_max = 0.0;
  cfg.drift = DriftKind::gaussian;  // zero scales: no effect
  const ForecastPanel panel = generate_panel(cfg);
  CHECK((panel.members.colwise() - panel.targets).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian drift ramp endpoints") {
  CHECK(drift_ramp(0, 4000) == 0.0);
  CHECK(drift_ramp(4000, 4000) == 1.0);
}

TEST_CASE("zero drift scales leave members untouched") {
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.horizon = 128;
  cfg.members = 4;
  const Vector y = gen_ground_truth(cfg);
  const Matrix x = gen_members(cfg, y);
  CHECK(add_gaussian_drift(cfg, x) == x);
}

TEST_CASE("constant-drift members drift exactly linearly") {
  SynthConfig cfg;
  cfg.seed = 21;
  cfg.horizon = 1000;
  cfg.members = 4;
  cfg.sigma_drift = 0.5;
  cfg.s_drift = 0.0;  // drift term collapses to the per-member bias
  const Vector y = gen_ground_truth(cfg);
  const Matrix base = gen_members(cfg, y);
  const Matrix drifted = add_gaussian_drift(cfg, base);
  const Matrix delta = drifted - base;
  for (Index k = 0; k < cfg.members; ++k) {
    const double slope_from_end =
        delta(cfg.horizon - 1, k);  // ramp is 1 at t = T
    CHECK(delta(499, k) ==
          doctest::Approx(slope_from_end * drift_ramp(500, 1000)).epsilon(1e-12));
    CHECK(std::abs(delta(0, k)) <=
          std::abs(slope_from_end) * drift_ramp(1, 1000) + 1e-15);
  }
}

TEST_CASE("noisy gaussian drift has the drawn per-member slope") {
  SynthConfig cfg;
  cfg.seed = 31;
  cfg.horizon = 4000;
  cfg.members = 6;
  cfg.sigma_drift = 0.5;
  cfg.s_drift = 0.5;
  const Vector y = gen_ground_truth(cfg);
  const Matrix base = gen_members(cfg, y);
  const Matrix drifted = add_gaussian_drift(cfg, base);
  const Matrix delta = drifted - base;  // ramp(t) * N(b'_k, sd'_k)

  const double n = static_cast<double>(cfg.horizon);
  Vector t(cfg.horizon);
  for (Index i = 0; i < cfg.horizon; ++i) t(i) = static_cast<double>(i + 1);
  const double t_mean = t.mean();
  const double t_ss = (t.array() - t_mean).square().sum();
  for (Index k = 0; k < cfg.members; ++k) {
    // Undoing the ramp recovers the raw drift draws; their mean estimates
    // the hidden b'_k.
    const double b_hat =
        (delta.col(k).array() / (t.array() / n)).mean();
    const double slope =
        ((t.array() - t_mean) * (delta.col(k).array() - delta.col(k).mean()))
            .sum() /
        t_ss;
    const double se = 0.5 / std::sqrt(t_ss);  // sd'_k <= 0.5
    CHECK(std::abs(slope - b_hat / n) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("bernoulli drift gates") {
  SynthConfig cfg;
  cfg.seed = 8;
  cfg.horizon = 4000;
  cfg.members = 5;
  cfg.drift = DriftKind::bernoulli;
  const Vector y = gen_ground_truth(cfg);
  const Matrix base = gen_members(cfg, y);

  SUBCASE("p = 0 means no drift is added") {
    cfg.p_drift = 0.0;
    CHECK(add_bernoulli_drift(cfg, base) == base);
  }
  SUBCASE("p = 1 means the drift is always added") {
    cfg.p_drift = 1.0;
    const Matrix drifted = add_bernoulli_drift(cfg, base);
    // Drift draws are continuous, so a zero perturbation has measure zero.
    CHECK(((drifted - base).cwiseAbs().array() > 0.0).all());
  }
  SUBCASE("p = 0.5 perturbs about half the steps") {
    cfg.p_drift = 0.5;
    const Matrix drifted = add_bernoulli_drift(cfg, base);
    for (Index k = 0; k < cfg.members; ++k) {
      const double fraction =
          ((drifted.col(k) - base.col(k)).cwiseAbs().array() > 0.0)
              .cast<double>()
              .mean();
      CHECK(fraction > 0.47);
      CHECK(fraction < 0.53);
    }
  }
}

TEST_CASE("full panel generation is deterministic and shaped") {
  SynthConfig cfg;
  cfg.seed = 77;
  cfg.horizon = 300;
  cfg.members = 7;
  cfg.drift = DriftKind::gaussian;
  cfg.sigma_drift = 0.4;
  cfg.s_drift = 0.2;
  const ForecastPanel a = generate_panel(cfg);
  const ForecastPanel b = generate_panel(cfg);
  CHECK(a.rows() == 300);
  CHECK(a.member_count() == 7);
  CHECK(a.members == b.members);
  CHECK(a.targets == b.targets);
  CHECK(a.timestamps.front() == 1);
  CHECK(a.timestamps.back() == 300);
}

TEST_CASE("config validation rejects bad ranges") {
  SynthConfig cfg;
  cfg.p_drift = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.bias_min = 1.0;
  cfg.bias_max = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
