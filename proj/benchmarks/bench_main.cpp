#include <benchmark/benchmark.h>

#include <random>

#include "drt/linalg.hpp"
#include "drt/lp_oracle.hpp"
#include "drt/mixture.hpp"
#include "drt/monte_carlo.hpp"
#include "drt/radar.hpp"
#include "drt/random.hpp"

namespace {

void BM_Envelope(benchmark::State& state) {
  const drt::FrontSample front = drt::build_front(drt::random_design_grid(1, state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(drt::lower_convex_envelope(front));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Envelope)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_SolveLp(benchmark::State& state) {
  const drt::DesignGrid grid = drt::random_design_grid(2, state.range(0));
  const double c = 0.5 * (grid.min_cost() + grid.max_cost());
  for (auto _ : state) benchmark::DoNotOptimize(drt::solve_lp(grid, c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveLp)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_MixtureAndKkt(benchmark::State& state) {
  const drt::DesignGrid grid = drt::random_design_grid(3, state.range(0));
  const drt::FrontSample front = drt::build_front(grid);
  const drt::EnvelopeResult env = drt::lower_convex_envelope(front);
  const double c = 0.5 * (grid.min_cost() + grid.max_cost());
  for (auto _ : state) benchmark::DoNotOptimize(drt::verify_kkt(grid, drt::build_mixture(env, front, c), c));
}
BENCHMARK(BM_MixtureAndKkt)->Arg(200)->Arg(2000);

void BM_Jacobi(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  drt::SplitMix64 rng(4);
  std::normal_distribution<double> nd;
  drt::CMatrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = drt::cdouble(nd(rng), nd(rng));
  const drt::CMatrix a = b * b.adjoint();
  for (auto _ : state) benchmark::DoNotOptimize(drt::jacobi_eigen(a));
}
BENCHMARK(BM_Jacobi)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_TangentPower(benchmark::State& state) {
  const drt::DetectionCurve curve(1.0, 1e-5);
  for (auto _ : state) benchmark::DoNotOptimize(drt::tangent_power(curve));
}
BENCHMARK(BM_TangentPower);

void BM_MonteCarloTrials(benchmark::State& state) {
  drt::CMatrix gram = drt::CMatrix::Identity(2, 2);
  gram(1, 1) = 0.25;
  drt::CMatrix r = drt::CMatrix::Zero(2, 2);
  r(0, 0) = 3;
  const drt::SimConfig cfg{drt::RadarScenario(gram, 1, 4, 4, 1e-2, 3), r,
                           static_cast<std::size_t>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(drt::estimate_pd(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloTrials)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
