// Micro benchmarks for the hot paths: single steps, full trajectories and
// phase portraits.

#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "bsym/bsym.hpp"

using namespace bsym;

namespace {

IntegratorConfig rk4(double step, double t_max) {
  IntegratorConfig c;
  c.step = step;
  c.t_max = t_max;
  return c;
}

void BM_VectorField(benchmark::State& state) {
  const auto s = PhaseStructure::twisted();
  const auto h = HamiltonianSpec::mechanical(PotentialSpec::periodic(1.0));
  const std::vector<double> x{0.3, 0.7};
  std::vector<double> scratch(2), out(2);
  for (auto _ : state) {
    hamiltonian_vector_field_into(s, h, x, scratch, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_VectorField);

void BM_Rk4Step(benchmark::State& state) {
  const auto s = PhaseStructure::twisted();
  const auto h = HamiltonianSpec::mechanical(PotentialSpec::linear(1.0));
  const PhaseState x({0.0}, {1.0});
  for (auto _ : state) benchmark::DoNotOptimize(step(s, h, x, 1e-3));
}
BENCHMARK(BM_Rk4Step);

void BM_StokesTrajectory(benchmark::State& state) {
  const auto s = PhaseStructure::twisted();
  const auto h = HamiltonianSpec::mechanical(PotentialSpec::linear(1.0));
  const auto cfg = rk4(1e-3, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s, h, PhaseState({0.0}, {1.0}), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_StokesTrajectory)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_AdaptivePendulum(benchmark::State& state) {
  const auto s = PhaseStructure::twisted().with_angles({true});
  const auto h = HamiltonianSpec::mechanical(PotentialSpec::periodic(1.0));
  IntegratorConfig cfg;
  cfg.method = Method::rk_adaptive;
  cfg.t_max = 50.0;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s, h, PhaseState({0.0}, {2.0}), cfg));
}
BENCHMARK(BM_AdaptivePendulum)->Unit(benchmark::kMicrosecond);

void BM_PendulumPortrait(benchmark::State& state) {
  const auto s = PhaseStructure::twisted().with_angles({true});
  const auto h = HamiltonianSpec::mechanical(PotentialSpec::periodic(1.0));
  std::vector<PhaseState> grid;
  for (int i = 0; i < 8; ++i) {
    const double q = 2 * std::numbers::pi * (i + 0.5) / 8;
    for (double p : {-1.5, -0.5, 0.5, 1.5}) grid.emplace_back(std::vector<double>{q}, std::vector<double>{p});
  }
  IntegratorConfig cfg;
  cfg.method = Method::rk_adaptive;
  cfg.t_max = 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(phase_portrait(s, h, grid, cfg));
}
BENCHMARK(BM_PendulumPortrait)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
