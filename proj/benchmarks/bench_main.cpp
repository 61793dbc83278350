#include <benchmark/benchmark.h>

#include "layersolve/discretization.hpp"
#include "layersolve/registry.hpp"
#include "layersolve/solver.hpp"

namespace ls = layersolve;

namespace {

ls::ProblemSpec example1() { return ls::make_example("example1", {1e-8, 1e-6}); }

ls::SpatialMesh mesh_for(std::size_t n) {
  const auto spec = example1();
  return ls::build_layer_mesh(ls::derive_regime(spec), spec.params, n, spec.d);
}

void BM_BuildMesh(benchmark::State& state) {
  const auto spec = example1();
  const auto regime = ls::derive_regime(spec);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ls::build_layer_mesh(regime, spec.params, n, spec.d));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildMesh)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_ThomasSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = example1();
  const auto mesh = mesh_for(n);
  const std::vector<double> u(n + 1, 0.0);
  const auto sys = ls::assemble(spec, mesh, 0.5, 1.0 / static_cast<double>(n), u);
  for (auto _ : state) benchmark::DoNotOptimize(ls::thomas_solve(sys));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThomasSolve)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_Assemble(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = example1();
  const auto mesh = mesh_for(n);
  const std::vector<double> u(n + 1, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ls::assemble(spec, mesh, 0.5, 1.0 / static_cast<double>(n), u));
  }
}
BENCHMARK(BM_Assemble)->RangeMultiplier(4)->Range(64, 16384);

void BM_March(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = example1();
  const auto mesh = mesh_for(n);
  const ls::CheckPolicy checks{state.range(1) != 0 ? ls::CheckMode::Warn : ls::CheckMode::Off};
  for (auto _ : state) benchmark::DoNotOptimize(ls::march(spec, mesh, ls::TimeGrid(n, 1.0), checks));
}
BENCHMARK(BM_March)->ArgsProduct({{64, 256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
