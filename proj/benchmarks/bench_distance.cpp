#include <benchmark/benchmark.h>

#include "krf/distance.hpp"

using namespace krf;

namespace {

ConformalMetric smooth_metric(TorusGrid g) {
  ScalarField u(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i)
      u.at(i, j) = 0.5 * std::sin(6.2831853 * i * g.h()) *
                   std::cos(6.2831853 * j * g.h());
  return ConformalMetric::from_field(std::move(u), "bench");
}

}  // namespace

static void BM_Eikonal(benchmark::State& state) {
  TorusGrid g(static_cast<int>(state.range(0)));
  ConformalMetric m = smooth_metric(g);
  for (auto _ : state) {
    DistanceField d = eikonal_distance(m, {0.25, 0.75});
    benchmark::DoNotOptimize(d.values.data().data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_Eikonal)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_LatticeDijkstra(benchmark::State& state) {
  TorusGrid g(static_cast<int>(state.range(0)));
  ConformalMetric m = smooth_metric(g);
  for (auto _ : state) {
    DistanceField d = lattice_distance(m, {0.25, 0.75});
    benchmark::DoNotOptimize(d.values.data().data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_LatticeDijkstra)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
