#include <benchmark/benchmark.h>

#include "krf/flow.hpp"

using namespace krf;

static void BM_FlowStep(benchmark::State& state) {
  TorusGrid g(static_cast<int>(state.range(0)));
  Spectral sp(g);
  SingularPotential zero(g);
  SingularPotential minus(g, {{{0.5, 0.5}, 0.8, Sign::minus}}, sp);
  FlowState s = init_state(zero, minus, 6, sp);
  // March into the mid-ladder regime so the step cost is representative.
  for (int k = 0; k < 5; ++k) s = step(s, 1e-4, sp);
  for (auto _ : state) {
    FlowState next = step(s, 1e-3, sp);
    benchmark::DoNotOptimize(next.u.data().data());
  }
}
BENCHMARK(BM_FlowStep)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_InitState(benchmark::State& state) {
  TorusGrid g(static_cast<int>(state.range(0)));
  Spectral sp(g);
  SingularPotential zero(g);
  SingularPotential minus(g, {{{0.5, 0.5}, 0.8, Sign::minus}}, sp);
  for (auto _ : state) {
    FlowState s = init_state(zero, minus, 6, sp);
    benchmark::DoNotOptimize(s.phi.data().data());
  }
}
BENCHMARK(BM_InitState)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
