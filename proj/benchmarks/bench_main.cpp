#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "nwidths/approximation.hpp"

using namespace nwidths;

namespace {

Manifold model_for(int64_t index) {
  switch (index) {
    case 0: return Manifold::circle();
    case 1: return Manifold::torus2();
    default: return Manifold::sphere2();
  }
}

std::vector<double> random_coeffs(std::size_t n) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c(n);
  for (double& v : c) v = g(rng);
  return c;
}

void BM_KernelEval(benchmark::State& state) {
  const auto m = model_for(state.range(0));
  const double t = 1.0 / static_cast<double>(state.range(1));
  const SpectralKernel k(m, make_gaussian(), t);
  const Point x = base_point(m);
  const auto grid = grid_for_degree(m, 16);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k(x, grid.nodes[i]));
    i = (i + 1) % grid.size();
  }
}
BENCHMARK(BM_KernelEval)->ArgsProduct({{0, 1, 2}, {1, 8, 32}});

void BM_AnalyzeSynthesize(benchmark::State& state) {
  const auto m = model_for(state.range(0));
  const double omega = static_cast<double>(state.range(1));
  const SpectralCoeffs f(m, omega, random_coeffs(m.weyl_count(omega)));
  const auto grid = analysis_grid(m, omega);
  for (auto _ : state) {
    const auto back = analyze(synthesize(f, grid), omega);
    benchmark::DoNotOptimize(back.coeffs().data());
  }
}
BENCHMARK(BM_AnalyzeSynthesize)->ArgsProduct({{0, 1, 2}, {64, 256, 1024}})->Unit(benchmark::kMillisecond);

void BM_WidthExperiment(benchmark::State& state) {
  const auto m = model_for(state.range(0));
  ExperimentParams params;
  params.r = 2.0;
  params.m_min = 2;
  params.m_max = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto res = width_rate_experiment(m, params);
    benchmark::DoNotOptimize(res.rows.data());
  }
}
BENCHMARK(BM_WidthExperiment)->ArgsProduct({{0, 2}, {5, 7}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
