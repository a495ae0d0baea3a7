#include <benchmark/benchmark.h>

#include <cmath>

#include <hybridbvp/coupled.hpp>
#include <hybridbvp/plaplace.hpp>
#include <hybridbvp/poincare.hpp>

using namespace hybridbvp;

namespace {

void BM_AssembleF(benchmark::State& state) {
  const auto spec = registry("paper-example").first;
  const Grid g(static_cast<std::size_t>(state.range(0)));
  const auto u = GridFunction::interpolate(g, [](double t) { return t * (1 - t); });
  const auto v = GridFunction::interpolate(g, [](double t) { return std::cos(t); });
  for (auto _ : state) benchmark::DoNotOptimize(assemble_F(u, v, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleF)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ApplyT(benchmark::State& state) {
  const auto spec = registry("paper-example").second;
  const Grid g(static_cast<std::size_t>(state.range(0)));
  const auto u = GridFunction::interpolate(g, [](double t) { return t * (1 - t); });
  const auto v = GridFunction::interpolate(g, [](double t) { return std::cos(t); });
  for (auto _ : state) benchmark::DoNotOptimize(apply_T(u, v, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyT)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_Poincare(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(poincare_constant(p, 256));
}
BENCHMARK(BM_Poincare)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SolveExample(benchmark::State& state) {
  auto spec = registry("paper-example");
  spec.n_cells = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_system(spec));
}
BENCHMARK(BM_SolveExample)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace
BENCHMARK_MAIN();
