#include <iostream>
#include <random>

#include "adaptens/adaptive.hpp"
#include "adaptens/robustcheck.hpp"
#include "commands.hpp"
#include "helpers.hpp"
#include "manifest.hpp"

namespace adaptens::cli {

namespace {

std::vector<UncertaintySet> select_sets(const std::string& norms) {
  // Radius is re-drawn per instance; 1.0 is a placeholder.
  if (norms == "all")
    return {UncertaintySet::induced(VectorNorm::l2, VectorNorm::l2, 1.0),
            UncertaintySet::induced(VectorNorm::l1, VectorNorm::l2, 1.0),
            UncertaintySet::frobenius(2.0, 1.0)};
  if (norms == "f2") return {UncertaintySet::frobenius(2.0, 1.0)};
  const auto parts = split_csv(norms);
  if (parts.size() != 2)
    throw std::invalid_argument(
        "--norms expects 'p,q' (loss, regularizer), 'f2', or 'all'");
  // The pair is given as (loss norm p, regularizer norm q).
  const VectorNorm g = parse_norm(parts[0]);
  const VectorNorm h = parse_norm(parts[1]);
  return {UncertaintySet::induced(h, g, 1.0)};
}

// Desk-scale random instance. Odd seeds route beta through the affine
// decision rule so the stacked coefficients live in the adaptive set.
struct Instance {
  Matrix x_design;
  Vector y;
  Vector beta;
  double lambda;
};

Instance make_instance(std::uint64_t seed) {
  std::mt19937_64 rng(0x51ed2701ULL ^ (seed * 0x9e3779b97f4a7c15ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> t_draw(2, 6);
  std::uniform_int_distribution<int> m_draw(1, 3);
  std::uniform_real_distribution<double> lambda_draw(0.05, 1.5);

  const Index t = t_draw(rng);
  const Index m = m_draw(rng);
  Matrix x(t, m);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < m; ++j) x(i, j) = normal(rng);
  Instance inst;
  inst.x_design = block_design(x);
  inst.y = Vector(t);
  for (Index i = 0; i < t; ++i) inst.y(i) = normal(rng);
  inst.lambda = lambda_draw(rng);

  inst.beta = Vector(t * m);
  if (seed % 2 == 1) {
    const int tau = 1;
    Vector beta0(m);
    for (Index j = 0; j < m; ++j) beta0(j) = normal(rng);
    Matrix v0(m, m * tau);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m * tau; ++j) v0(i, j) = normal(rng);
    ForecastPanel panel;
    panel.members = x;
    panel.targets = inst.y;
    panel.timestamps.resize(static_cast<std::size_t>(t));
    for (Index i = 0; i < t; ++i) panel.timestamps[static_cast<std::size_t>(i)] = i;
    for (Index j = 0; j < m; ++j) panel.member_names.push_back("m");
    for (Index i = 0; i < t; ++i) {
      const Vector z = build_context(panel, i, tau, 1).z;
      inst.beta.segment(i * m, m) = beta0 + v0 * z;
    }
  } else {
    for (Index i = 0; i < t * m; ++i) inst.beta(i) = normal(rng);
  }
  return inst;
}

}  // namespace

int cmd_verify(const VerifyCommand& cmd) {
  const auto sets = select_sets(cmd.norms);
  bool all_pass = true;
  std::string lines;
  for (std::int64_t seed = 1; seed <= cmd.seeds; ++seed) {
    const Instance inst = make_instance(static_cast<std::uint64_t>(seed));
    for (UncertaintySet set : sets) {
      set.radius = inst.lambda;
      const EquivalenceReport report =
          verify_equivalence(inst.x_design, inst.y, inst.beta, set, cmd.samples,
                             static_cast<std::uint64_t>(seed));
      all_pass = all_pass && report.pass();
      const std::string line = "{\"set\":\"" + set.label() +
                               "\",\"seed\":" + std::to_string(seed) +
                               ",\"lambda\":" + fmt(set.radius) +
                               ",\"report\":" + report.json() + "}";
      std::cout << line << "\n";
      lines += line + "\n";
    }
  }
  if (!cmd.out.empty()) {
    const auto dir = ensure_out_dir(cmd.out);
    write_file(dir / "verify.jsonl", lines);
    RunManifest manifest;
    manifest.command = "verify";
    manifest.version = ADAPTENS_VERSION;
    manifest.config = {{"norms", cmd.norms},
                       {"seeds", std::to_string(cmd.seeds)},
                       {"samples", std::to_string(cmd.samples)}};
    for (std::int64_t s = 1; s <= cmd.seeds; ++s)
      manifest.seeds.push_back(static_cast<std::uint64_t>(s));
    manifest.outputs = {"verify.jsonl"};
    manifest.write(dir);
  }
  return all_pass ? kOk : kVerification;
}

}  // namespace adaptens::cli
