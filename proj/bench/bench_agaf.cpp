// Serial vs OpenMP for the phase scan and Monte Carlo density; companion vs Aberth roots.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "agaf/gaf.hpp"
#include "agaf/pointprocess.hpp"

using namespace agaf;

static void BM_PhaseScan(benchmark::State& state) {
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(repulsive_phase_check(4.0, 64, exec));
}
BENCHMARK(BM_PhaseScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_McDensity(benchmark::State& state) {
  McConfig cfg;
  cfg.q = 0.3;
  cfg.r = 0.3;
  cfg.n_samples = 100;
  cfg.exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) benchmark::DoNotOptimize(mc_density(cfg, 8));
}
BENCHMARK(BM_McDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Roots(benchmark::State& state) {
  const auto solver = state.range(0) ? RootSolver::aberth : RootSolver::companion;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<cplx> a(state.range(1) + 1);
  for (auto& c : a) c = cplx(g(rng), g(rng));
  for (auto _ : state) benchmark::DoNotOptimize(polynomial_roots(a, solver));
}
BENCHMARK(BM_Roots)->ArgsProduct({{0, 1}, {64, 256}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
