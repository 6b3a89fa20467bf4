#include <benchmark/benchmark.h>

#include "krf/spectral.hpp"

using namespace krf;

namespace {

ScalarField test_field(TorusGrid g) {
  ScalarField f(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i)
      f.at(i, j) = std::sin(6.2831853 * i * g.h()) * std::cos(12.566371 * j * g.h());
  f.make_mean_zero();
  return f;
}

}  // namespace

static void BM_Laplacian(benchmark::State& state) {
  TorusGrid g(static_cast<int>(state.range(0)));
  Spectral sp(g);
  ScalarField f = test_field(g);
  for (auto _ : state) {
    ScalarField lap = sp.laplacian(f);
    benchmark::DoNotOptimize(lap.data().data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_Laplacian)->Arg(256)->Arg(512)->Arg(1024);

static void BM_PoissonSolve(benchmark::State& state) {
  TorusGrid g(static_cast<int>(state.range(0)));
  Spectral sp(g);
  ScalarField f = test_field(g);
  for (auto _ : state) {
    ScalarField phi = sp.solve_poisson(f);
    benchmark::DoNotOptimize(phi.data().data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_PoissonSolve)->Arg(256)->Arg(512)->Arg(1024);

BENCHMARK_MAIN();
