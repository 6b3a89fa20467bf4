#include "krf/counterexample.hpp"

#include <cmath>
#include <stdexcept>

#include "krf/distance.hpp"
#include "krf/metric.hpp"

namespace krf {

namespace {

constexpr double kLn4 = 1.3862943611198906;

struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

double dist_to_multiple(double x, double s) {
  const double r = x - s * std::round(x / s);
  return std::fabs(r);
}

// Distance from a point to the carved line network.
double net_distance(Vec2 p, const CounterexampleParams& prm) {
  // Axis families offset by half a grid cell so the rastered tube is exactly
  // two node rows wide; diagonal families through the origin.
  double d = dist_to_multiple(p.x - 0.5 / prm.n, prm.s_axis);
  d = std::min(d, dist_to_multiple(p.y - 0.5 / prm.n, prm.s_axis));
  d = std::min(d, dist_to_multiple(p.x - p.y, prm.s_diag * std::sqrt(2.0)) / std::sqrt(2.0));
  d = std::min(d, dist_to_multiple(p.x + p.y, prm.s_diag * std::sqrt(2.0)) / std::sqrt(2.0));
  return d;
}

}  // namespace

CounterexampleParams counterexample_params(int level) {
  switch (level) {
    case 2: return {2, 512, 0.25, 0.25, 2.0 / 512};
    case 3: return {3, 1024, 0.125, 0.2, 2.0 / 1024};
    case 4: return {4, 2048, 0.0625, 0.25, 2.0 / 2048};
    case 5: return {5, 4096, 0.07, 0.12, 2.0 / 4096};
    // Levels 6+ carry the construction as far as the resolution allows; the
    // weak-convergence budget cannot be met at these grid sizes (the carved
    // tube cannot be thinner than two cells while the net keeps its covering
    // radius), so the run reports the honest deficit instead.
    case 6: return {6, 4096, 0.035, 0.08, 2.0 / 4096};
    case 7: return {7, 4096, 0.0175, 0.05, 2.0 / 4096};
    default:
      throw std::invalid_argument("counterexample: level must be in 2..7");
  }
}

CounterexampleDensity counterexample_density(int level, TorusGrid grid) {
  return counterexample_density(counterexample_params(level), grid);
}

CounterexampleDensity counterexample_density(const CounterexampleParams& p,
                                             TorusGrid grid) {
  if (grid.n() < 512)
    throw std::invalid_argument("counterexample: resolution below 512");
  if (p.width < 2.0 * grid.h() * (1.0 - 1e-12))
    throw std::runtime_error(
        "counterexample: resolution too coarse to carve the tube (width < 2h)");

  CounterexampleDensity out;
  out.psi = ScalarField(grid);
  const int n = grid.n();
  std::size_t tube_nodes = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (net_distance(grid.point(i, j), p) <= 0.5 * p.width) {
        out.psi.at(i, j) = -kLn4;
        ++tube_nodes;
      }
  const std::size_t N = grid.size();
  out.tube_fraction = static_cast<double>(tube_nodes) / N;

  // Raise the complement uniformly: (1-A) e^{delta} + A/4 = 1 exactly.
  const double A = out.tube_fraction;
  const double delta = std::log((1.0 - 0.25 * A) / (1.0 - A));
  if (delta > kLn4)
    throw std::runtime_error("counterexample: compensation exceeds the ln 4 cap");
  for (std::size_t i = 0; i < N; ++i)
    if (out.psi[i] == 0.0) out.psi[i] = delta;

  long double l1 = 0.0L;
  for (std::size_t i = 0; i < N; ++i) l1 += std::fabs(std::exp(out.psi[i]) - 1.0);
  out.l1_deviation = static_cast<double>(l1 / static_cast<long double>(N));

  // Covering radius estimate: worst node distance to the net.
  double snap = 0.0;
  for (int j = 0; j < n; j += 2)
    for (int i = 0; i < n; i += 2)
      snap = std::max(snap, net_distance(grid.point(i, j), p));
  out.snap_radius = snap;
  return out;
}

CounterexampleReport counterexample_run(int level, std::uint64_t seed) {
  const CounterexampleParams prm = counterexample_params(level);
  TorusGrid grid(prm.n);
  const CounterexampleDensity den = counterexample_density(prm, grid);

  CounterexampleReport rep;
  rep.level = level;
  rep.n = prm.n;
  rep.l1_deviation = den.l1_deviation;
  rep.l1_bound = 1.1 * std::ldexp(1.0, -level);
  rep.pass_weak = rep.l1_deviation <= rep.l1_bound;

  ConformalMetric m = ConformalMetric::from_field(den.psi, "net-density");

  // Pair battery: random pairs plus diameter-order pairs.
  Rng rng(seed);
  const int n_src = 6, n_tgt = 8;
  rep.sup_bound = 5.0 * std::ldexp(1.0, -level) + 2.0 * grid.h();
  rep.sup_dev_half = 0.0;
  rep.lower_half_ok = true;
  rep.min_gap_to_flat = 1e300;
  double max_flat_gap_pairs = 0.0;

  for (int s = 0; s < n_src; ++s) {
    const Vec2 src{rng.uniform(), rng.uniform()};
    DistanceField dj = eikonal_distance(m, src);
    for (int t = 0; t < n_tgt; ++t) {
      const Vec2 tgt{rng.uniform(), rng.uniform()};
      const double dS = flat_distance(src, tgt);
      if (dS < 4.0 * grid.h()) continue;
      const double v = dj.at_point(tgt);
      rep.sup_dev_half = std::max(rep.sup_dev_half, std::fabs(v - 0.5 * dS));
      if (v < 0.5 * dS - 1e-3) rep.lower_half_ok = false;
    }
    // Diameter-order target: the antipodal point of the source.
    const Vec2 anti = wrap01(Vec2{src.x + 0.5, src.y + 0.5});
    const double dS = flat_distance(src, anti);
    const double v = dj.at_point(anti);
    rep.sup_dev_half = std::max(rep.sup_dev_half, std::fabs(v - 0.5 * dS));
    rep.min_gap_to_flat = std::min(rep.min_gap_to_flat, std::fabs(v - dS));
    max_flat_gap_pairs = std::max(max_flat_gap_pairs, dS);
  }
  rep.pass_metric = rep.sup_dev_half <= rep.sup_bound;
  rep.gap_bound = 0.4 * max_flat_gap_pairs / 2.0;
  rep.pass_gap = rep.min_gap_to_flat >= rep.gap_bound;
  return rep;
}

}  // namespace krf
