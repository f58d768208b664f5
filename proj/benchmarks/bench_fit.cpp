#include <benchmark/benchmark.h>

#include <random>

#include "adaptens/adaptive.hpp"
#include "adaptens/baselines.hpp"
#include "adaptens/metrics.hpp"
#include "adaptens/synth.hpp"

using namespace adaptens;

namespace {

ForecastPanel bench_panel(Index rows, Index members) {
  SynthConfig cfg;
  cfg.horizon = rows;
  cfg.members = members;
  cfg.drift = DriftKind::gaussian;
  cfg.sigma_drift = 0.5;
  cfg.s_drift = 0.5;
  cfg.seed = 1;
  return generate_panel(cfg);
}

}  // namespace

static void BM_AssembleProblem(benchmark::State& state) {
  const auto panel = bench_panel(state.range(0), 10);
  AssembleOptions options;
  options.allow_underdetermined = true;
  for (auto _ : state) {
    auto problem = assemble_problem(panel, static_cast<int>(state.range(1)), options);
    benchmark::DoNotOptimize(problem);
  }
}
BENCHMARK(BM_AssembleProblem)
    ->Args({1000, 5})
    ->Args({3000, 5})
    ->Args({3000, 10})
    ->Unit(benchmark::kMillisecond);

static void BM_SquaredSolve(benchmark::State& state) {
  const auto panel = bench_panel(state.range(0), 10);
  AssembleOptions assemble;
  assemble.allow_underdetermined = true;
  const auto problem =
      assemble_problem(panel, static_cast<int>(state.range(1)), assemble);
  problem.design_gram();  // warm the cached pieces
  problem.regularizer_gram();
  SolveOptions options;
  options.mode = SolveMode::squared;
  for (auto _ : state) {
    auto rule = solve_adaptive_ridge(problem, 1e-2, options);
    benchmark::DoNotOptimize(rule);
  }
}
BENCHMARK(BM_SquaredSolve)
    ->Args({1000, 5})
    ->Args({3000, 5})
    ->Args({3000, 10})
    ->Unit(benchmark::kMillisecond);

static void BM_FaithfulSolve(benchmark::State& state) {
  const auto panel = bench_panel(state.range(0), 10);
  const auto problem = assemble_problem(panel, static_cast<int>(state.range(1)), {});
  problem.design_gram();
  problem.regularizer_gram();
  for (auto _ : state) {
    auto rule = solve_adaptive_ridge(problem, 1e-2, {});
    benchmark::DoNotOptimize(rule);
  }
}
BENCHMARK(BM_FaithfulSolve)->Args({1000, 5})->Args({3000, 5})->Unit(benchmark::kMillisecond);

static void BM_RidgeFit(benchmark::State& state) {
  const auto panel = bench_panel(state.range(0), 10);
  for (auto _ : state) {
    auto beta = ridge_fit(panel.members, panel.targets, 1e-2);
    benchmark::DoNotOptimize(beta);
  }
}
BENCHMARK(BM_RidgeFit)->Arg(1000)->Arg(3000)->Unit(benchmark::kMicrosecond);

static void BM_Cvar(benchmark::State& state) {
  std::mt19937 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = state.range(0);
  Vector y(n), y_hat(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = normal(rng);
    y_hat(i) = normal(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(cvar(y, y_hat, 0.05));
    benchmark::DoNotOptimize(cvar(y, y_hat, 0.15));
  }
}
BENCHMARK(BM_Cvar)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
