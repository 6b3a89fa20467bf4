#include "krf/verify.hpp"

#include <algorithm>
#include <cmath>

#include "krf/quadrature.hpp"

namespace krf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// splitmix64; keeps sampling platform-independent.
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

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / sxx;
}
}  // namespace

bool all_required_pass(const EstimateReport& report) {
  for (const auto& r : report)
    if (!r.optional && !r.pass) return false;
  return true;
}

int matched_truncation_level(int k, int grid_n) {
  const int j = 4 + 2 * (k / 2);
  const int cap = std::max(
      4, static_cast<int>(std::floor(std::log(0.013 * grid_n * double(grid_n)))));
  return std::min(j, cap);
}

CheckResult check_area_conservation(const Trajectory& traj, const std::string& scen) {
  CheckResult r{"area-conservation", scen};
  r.tolerance = 1e-8;
  r.provenance = "contract";
  for (const auto& row : traj.rows) r.value = std::max(r.value, row.area_err);
  r.pass = r.value <= r.tolerance;
  return r;
}

CheckResult check_maximum_principle(const Trajectory& traj, const std::string& scen) {
  CheckResult r{"maximum-principle", scen};
  r.tolerance = 1e-7;
  r.provenance = "contract";
  const double lo = traj.states.front().phi.min();
  const double hi = traj.states.front().phi.max();
  double worst = 0.0;
  for (const auto& st : traj.states) {
    worst = std::max(worst, lo - st.phi.min());
    worst = std::max(worst, st.phi.max() - hi);
  }
  r.value = worst;
  r.pass = worst <= r.tolerance;
  return r;
}

CheckResult check_lp_monotonicity(const Trajectory& traj, const std::string& scen) {
  CheckResult r{"lp-monotonicity", scen};
  r.tolerance = 1e-6;
  r.provenance = "contract";
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.rows.size(); ++k) {
    const double rel =
        (traj.rows[k].i2 - traj.rows[k - 1].i2) / std::max(traj.rows[k - 1].i2, 1e-300);
    worst = std::max(worst, rel);
  }
  r.value = worst;
  r.pass = worst <= r.tolerance;
  return r;
}

CheckResult check_mass_monotonicity(const Trajectory& traj, const std::string& scen) {
  CheckResult r{"mass-monotonicity", scen};
  r.tolerance = 1e-6;
  r.provenance = "contract";
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.rows.size(); ++k) {
    const double scale = std::max(std::fabs(traj.rows[k - 1].mass), 1e-6);
    worst = std::max(worst, (traj.rows[k - 1].mass - traj.rows[k].mass) / scale);
  }
  r.value = worst;
  r.pass = worst <= r.tolerance;
  return r;
}

double fitted_concavity_constant(const Trajectory& traj) {
  double c = 0.0;
  for (std::size_t k = 1; k + 1 < traj.rows.size(); ++k)
    c = std::max(c, traj.rows[k].d2);
  return c;
}

double fitted_gradient_constant(const Trajectory& traj) {
  // Smallest C with Gamma(t) <= C e^{Ct}: F(C) = max_t Gamma e^{-Ct} is
  // non-increasing in C, so bisect on F(C) <= C.
  auto F = [&](double C) {
    double m = 0.0;
    for (const auto& row : traj.rows) m = std::max(m, row.gamma * std::exp(-C * row.t));
    return m;
  };
  double lo = 0.0, hi = 1.0;
  while (F(hi) > hi && hi < 1e12) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) <= mid ? hi : lo) = mid;
  }
  return hi;
}

std::pair<double, double> phidot_bound_constants(const Trajectory& traj) {
  double bp = -1e300, bm = -1e300;
  for (const auto& row : traj.rows) {
    bp = std::max(bp, row.b_plus);
    bm = std::max(bm, row.b_minus);
  }
  return {bp, bm};
}

IntegrabilityResult check_curve_integrability(
    std::shared_ptr<const SingularPotential> minus_type, double scale,
    double base_length) {
  IntegrabilityResult out;
  const double nu = minus_type->max_nu();
  out.nu_eff = nu / scale;
  if (out.nu_eff >= 1.0)
    throw std::runtime_error(
        "check_curve_integrability: outside the hypothesis (nu_eff >= 1)");
  const TorusGrid& grid = minus_type->grid();
  const double h = grid.h();
  const Vec2 a = minus_type->poles().at(0).pos;

  // Integrand e^{-psi/s} as a conformal length element: u = -2 psi / s.
  ConformalMetric m = ConformalMetric::scaled_potential(minus_type, -2.0 / scale, 0.0,
                                                        "integrability-probe");

  out.offsets = {0.0, h, 4.0 * h};
  for (double off : out.offsets) {
    std::vector<double> lxs, lys;
    for (int k = 0; k <= 4; ++k) {
      const double L = base_length * std::pow(0.5, k);
      double integral;
      if (off == 0.0) {
        // Through the pole: split there, mirroring the finite-hits rule.
        integral = segment_length(wrap01({a.x - 0.5 * L, a.y}), a, m) +
                   segment_length(a, wrap01({a.x + 0.5 * L, a.y}), m);
      } else {
        integral = segment_length(wrap01({a.x - 0.5 * L, a.y + off}),
                                  wrap01({a.x + 0.5 * L, a.y + off}), m);
      }
      lxs.push_back(std::log(L));
      lys.push_back(std::log(integral));
    }
    out.exponents.push_back(ls_slope(lxs, lys));
  }
  out.min_exponent = *std::min_element(out.exponents.begin(), out.exponents.end());
  return out;
}

DensityAuditResult check_density_lemma(TorusGrid grid, int n_curves, int n_disks,
                                       std::uint64_t seed) {
  DensityAuditResult out;
  out.curves = n_curves;
  out.disks = n_disks;
  Rng rng(seed);
  const double step = grid.h() / 8.0;

  for (int c = 0; c < n_curves; ++c) {
    // Unit-speed curve with band-limited heading: arc-length by construction.
    const double L = 0.1 + 0.9 * rng.uniform();
    const int K = 4;
    double amp[K], freq[K], ph[K];
    for (int k = 0; k < K; ++k) {
      amp[k] = 2.0 * (rng.uniform() - 0.5);
      freq[k] = (k + 1) * kTwoPi / L;
      ph[k] = kTwoPi * rng.uniform();
    }
    const double th0 = kTwoPi * rng.uniform();
    Vec2 p{rng.uniform(), rng.uniform()};
    const int steps = static_cast<int>(L / step);
    std::vector<Vec2> pts(steps + 1);
    pts[0] = p;
    double x = p.x, y = p.y;
    for (int s = 1; s <= steps; ++s) {
      const double t = s * step;
      double th = th0;
      for (int k = 0; k < K; ++k) th += amp[k] * std::cos(freq[k] * t + ph[k]);
      x += step * std::cos(th);
      y += step * std::sin(th);
      pts[s] = {x, y};
    }

    for (int d = 0; d < n_disks; ++d) {
      const double rho = 0.02 + 0.2 * rng.uniform();
      Vec2 center;
      if (rng.uniform() < 0.7) {
        // Bias disks onto the curve so the bound is actually exercised.
        const Vec2 q = pts[static_cast<std::size_t>(rng.uniform() * steps)];
        center = wrap01(Vec2{q.x + rho * (rng.uniform() - 0.5),
                             q.y + rho * (rng.uniform() - 0.5)});
      } else {
        center = {rng.uniform(), rng.uniform()};
      }
      double inside = 0.0;
      for (const Vec2& q : pts)
        if (flat_distance(wrap01(q), center) <= rho) inside += step;
      const double bound = std::min(L, 8.0 * rho);
      out.worst_ratio = std::max(out.worst_ratio, inside / bound);
      if (inside > bound * 1.01 + 2.0 * step) ++out.violations;
    }
  }
  return out;
}

double CurvatureMeasure::disk_mass(Vec2 center, double r) const {
  const TorusGrid& g = cell_mass.grid();
  double m = 0.0;
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i)
      if (flat_distance(center, g.point(i, j)) <= r) m += cell_mass.at(i, j);
  return m;
}

CurvatureMeasure curvature_measure(const ScalarField& u, Spectral& sp) {
  CurvatureMeasure out;
  ScalarField lap = sp.laplacian(u);
  const double h2 = u.grid().h() * u.grid().h();
  out.cell_mass = ScalarField(u.grid());
  long double total = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.cell_mass[i] = -lap[i] * h2;
    total += out.cell_mass[i];
  }
  out.total = static_cast<double>(total);
  return out;
}

std::vector<ScalarField> weak_test_battery(TorusGrid grid) {
  // Fixed low-frequency battery: 8 distinct band-limited shapes.
  const int modes[8][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}, {2, 1, 0, 0},
                           {1, 2, 1, 1}, {2, 2, 0, 1}, {3, 1, 1, 0}, {1, 3, 1, 1}};
  std::vector<ScalarField> battery;
  for (const auto& m : modes) {
    ScalarField chi(grid);
    for (int j = 0; j < grid.n(); ++j)
      for (int i = 0; i < grid.n(); ++i) {
        const double x = i * grid.h(), y = j * grid.h();
        chi.at(i, j) = std::cos(kTwoPi * (m[0] * x + m[1] * y) + 0.3 * m[2]) +
                       0.5 * std::sin(kTwoPi * (m[1] * x - m[0] * y) + 0.7 * m[3]);
      }
    battery.push_back(std::move(chi));
  }
  return battery;
}

RicciConvergenceTable ricci_convergence(
    const std::vector<FlowState>& matched_states,
    std::shared_ptr<const SingularPotential> plus,
    std::shared_ptr<const SingularPotential> minus, double c_exact, Spectral& sp) {
  RicciConvergenceTable out;
  const TorusGrid& grid = sp.grid();
  const std::size_t N = grid.size();

  // Limit log-density at nodes, clamped where it dives at poles (the
  // integrand |u - target| is log-integrable; the clamp changes the grid
  // quadrature by O(h^2 log h)).
  std::vector<double> target(N);
  for (int j = 0; j < grid.n(); ++j)
    for (int i = 0; i < grid.n(); ++i) {
      const double v =
          plus->eval(grid.point(i, j)) - minus->eval(grid.point(i, j)) + c_exact;
      target[grid.index(i, j)] = std::clamp(std::isfinite(v) ? v : 0.0, -50.0, 50.0);
    }

  const auto battery = weak_test_battery(grid);
  std::vector<ScalarField> lap_chi;
  lap_chi.reserve(battery.size());
  for (const auto& chi : battery) lap_chi.push_back(sp.laplacian(chi));

  // Analytic pairing targets from the log-pole mass bookkeeping:
  // int (psi+ - psi-) lap(chi) = sum(+-nu chi(a)) - (A+ - A-) int chi.
  std::vector<double> pairing_target(battery.size(), 0.0);
  for (std::size_t b = 0; b < battery.size(); ++b) {
    double v = 0.0;
    for (const auto& p : plus->poles()) v += p.nu * battery[b].interp_bicubic(p.pos);
    for (const auto& p : minus->poles()) v -= p.nu * battery[b].interp_bicubic(p.pos);
    v -= (plus->qpsh_constant() - minus->qpsh_constant()) * battery[b].mean();
    pairing_target[b] = v;  // the additive constant pairs to zero
  }

  for (const auto& st : matched_states) {
    RicciConvergenceRow row;
    row.t = st.t;
    row.level = st.level;
    long double l1 = 0.0L;
    for (std::size_t i = 0; i < N; ++i) l1 += std::fabs(st.u[i] - target[i]);
    row.l1_error = static_cast<double>(l1 / static_cast<long double>(N));
    double worst = 0.0;
    for (std::size_t b = 0; b < battery.size(); ++b) {
      long double pairing = 0.0L;
      for (std::size_t i = 0; i < N; ++i) pairing += st.u[i] * lap_chi[b][i];
      const double err =
          std::fabs(static_cast<double>(pairing / static_cast<long double>(N)) -
                    pairing_target[b]);
      worst = std::max(worst, err);
    }
    row.weak_error = worst;
    out.rows.push_back(row);
  }

  std::sort(out.rows.begin(), out.rows.end(),
            [](const auto& a, const auto& b) { return a.t < b.t; });
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    // Errors should shrink as t decreases; rows are ascending in t.
    if (out.rows[k - 1].l1_error > out.rows[k].l1_error + 1e-4) out.l1_decreasing = false;
    if (out.rows[k - 1].weak_error > out.rows[k].weak_error + 1e-4)
      out.weak_decreasing = false;
  }
  out.final_l1 = out.rows.front().l1_error;
  out.final_weak = out.rows.front().weak_error;
  return out;
}

PairSet sample_pairs(TorusGrid grid, const std::vector<Vec2>& pole_anchors,
                     int n_sources, int targets_per_source, std::uint64_t seed) {
  PairSet out;
  Rng rng(seed);
  for (int s = 0; s < n_sources; ++s) {
    out.sources.push_back({rng.uniform(), rng.uniform()});
    std::vector<Vec2> tg;
    for (int t = 0; t < targets_per_source; ++t)
      tg.push_back({rng.uniform(), rng.uniform()});
    out.targets.push_back(std::move(tg));
  }
  // Pole-anchored radial pairs: log-spaced radii from 3h outward.
  for (const Vec2& a : pole_anchors) {
    out.sources.push_back(a);
    std::vector<Vec2> tg;
    const double r_lo = 3.0 * grid.h(), r_hi = 0.45;
    for (int t = 0; t < 10; ++t) {
      const double r = r_lo * std::pow(r_hi / r_lo, t / 9.0);
      const double th = kTwoPi * rng.uniform();
      tg.push_back(wrap01(Vec2{a.x + r * std::cos(th), a.y + r * std::sin(th)}));
    }
    out.targets.push_back(std::move(tg));
  }
  return out;
}

MetricConvergenceTable flow_metric_convergence(
    const std::vector<FlowState>& matched_states,
    std::shared_ptr<const SingularPotential> plus,
    std::shared_ptr<const SingularPotential> minus, double c_exact,
    const PairSet& pairs) {
  MetricConvergenceTable out;

  // Reference distances for the limit current, one field per source.
  std::vector<DistanceField> ref;
  for (const Vec2& s : pairs.sources)
    ref.push_back(dT_distance(plus, minus, c_exact, s));

  for (const auto& st : matched_states) {
    ConformalMetric mt = ConformalMetric::from_field(st.u, "flow");
    double sup = 0.0;
    for (std::size_t s = 0; s < pairs.sources.size(); ++s) {
      DistanceField dt = eikonal_distance(mt, pairs.sources[s]);
      sup = std::max(sup, sup_discrepancy(dt, ref[s], pairs.targets[s]));
    }
    out.rows.push_back({st.t, st.level, sup});
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const auto& a, const auto& b) { return a.t < b.t; });
  for (std::size_t k = 1; k < out.rows.size(); ++k)
    if (out.rows[k - 1].sup_discrepancy > out.rows[k].sup_discrepancy + 2e-3)
      out.decreasing = false;
  out.final_value = out.rows.front().sup_discrepancy;
  return out;
}

EquicontinuityTable equicontinuity_fits(const std::vector<FlowState>& states,
                                        const PairSet& pairs, double family_alpha) {
  EquicontinuityTable out;
  out.family_alpha = family_alpha;

  std::vector<std::vector<double>> dt_all;  // per state, per pair
  std::vector<double> ds;
  bool first = true;
  for (const auto& st : states) {
    ConformalMetric mt = ConformalMetric::from_field(st.u, "flow");
    std::vector<double> dvals;
    for (std::size_t s = 0; s < pairs.sources.size(); ++s) {
      DistanceField df = eikonal_distance(mt, pairs.sources[s]);
      for (const Vec2& t : pairs.targets[s]) {
        dvals.push_back(std::max(df.at_point(t), 1e-12));
        if (first) ds.push_back(flat_distance(pairs.sources[s], t));
      }
    }
    first = false;
    dt_all.push_back(std::move(dvals));
  }

  double amin = 1e300, amax = -1e300, cmin = 1e300, cmax = -1e300;
  for (std::size_t k = 0; k < states.size(); ++k) {
    EquicontinuityRow row;
    row.t = states[k].t;
    std::vector<double> lyk;
    std::vector<double> lxk;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      lxk.push_back(std::log(ds[i]));
      lyk.push_back(std::log(dt_all[k][i]));
    }
    row.alpha = ls_slope(lxk, lyk);
    row.constant = envelope_constant(dt_all[k], ds, family_alpha, true);
    amin = std::min(amin, row.alpha);
    amax = std::max(amax, row.alpha);
    cmin = std::min(cmin, row.constant);
    cmax = std::max(cmax, row.constant);
    out.rows.push_back(row);
  }
  out.alpha_min = amin;
  out.alpha_max = amax;
  out.constant_drift = (cmax - cmin) / std::max(cmin, 1e-12);
  return out;
}

CrossValidationResult method_cross_validation(const ConformalMetric& m, Vec2 source,
                                              double floor) {
  CrossValidationResult out;
  out.floor = floor;
  // Both methods solve from the same grid node (the lattice oracle is a
  // graph metric on nodes).
  const double h = m.grid().h();
  const Vec2 snapped = m.grid().point(
      static_cast<int>(std::round(wrap01(source).x / h)),
      static_cast<int>(std::round(wrap01(source).y / h)));
  DistanceField de = eikonal_distance(m, snapped);
  DistanceField dl = lattice_distance(m, snapped);
  const TorusGrid& g = m.grid();
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const double a = de.values.at(i, j), b = dl.values.at(i, j);
      const double rel = std::fabs(a - b) / std::max(a, floor);
      out.sup_relative = std::max(out.sup_relative, rel);
    }
  return out;
}

}  // namespace krf
