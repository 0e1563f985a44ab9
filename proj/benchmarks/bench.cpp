#include <benchmark/benchmark.h>

#include "manylaser/ness.hpp"
#include "manylaser/trajectories.hpp"

using namespace manylaser;

static void BM_BuildLiouvillian(benchmark::State& state) {
  SystemParams p = figure_defaults(static_cast<int>(state.range(0)), 1.0);
  p.n_max = 8;
  for (auto _ : state) benchmark::DoNotOptimize(build_liouvillian(p));
}
BENCHMARK(BM_BuildLiouvillian)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_BuildSectorLiouvillian(benchmark::State& state) {
  SystemParams p = figure_defaults(static_cast<int>(state.range(0)), 1.0);
  p.n_max = 40;
  for (auto _ : state) benchmark::DoNotOptimize(build_sector_liouvillian(p));
}
BENCHMARK(BM_BuildSectorLiouvillian)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_NessDirect(benchmark::State& state) {
  SystemParams p = figure_defaults(static_cast<int>(state.range(0)), 1.0);
  p.n_max = 40;
  const auto liou = build_sector_liouvillian(p);
  NessOptions opt;
  opt.method = NessOptions::Method::Direct;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ness(liou, opt));
}
BENCHMARK(BM_NessDirect)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

static void BM_NessIterative(benchmark::State& state) {
  SystemParams p = figure_defaults(static_cast<int>(state.range(0)), 1.0);
  p.n_max = 40;
  const auto liou = build_sector_liouvillian(p);
  NessOptions opt;
  opt.method = NessOptions::Method::Iterative;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ness(liou, opt));
}
BENCHMARK(BM_NessIterative)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

// One trajectory over 100/J; reports integration steps per second.
static void BM_JumpTrajectory(benchmark::State& state) {
  const SystemParams p = figure_defaults(static_cast<int>(state.range(0)), 1.0);
  Schedule s;
  s.t_burn = 10;
  s.t_total = 100;
  s.sample_every = 1;
  long steps = 0;
  std::uint64_t seed = 1;
  for (auto _ : state) steps += run_jump_trajectory(p, seed++, s).diagnostics.steps;
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_JumpTrajectory)->Arg(2)->Arg(4)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
