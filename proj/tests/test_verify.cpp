#include <cmath>
#include <memory>

#include "doctest.h"
#include "krf/counterexample.hpp"
#include "krf/verify.hpp"
#include "test_util.hpp"

using namespace krf;

TEST_CASE("curve integrability: flat integrand has exponent one") {
  TorusGrid g(256);
  auto flat = std::make_shared<SingularPotential>(g);
  // A potential with no poles: the integral equals L exactly.
  ConformalMetric m = ConformalMetric::scaled_potential(flat, 1.0, 0.0, "flat");
  const double L = 0.2;
  CHECK_NEAR(segment_length({0.4, 0.5}, {0.4 + L, 0.5}, m), L, 1e-12);
}

TEST_CASE("curve integrability: scaled pole meets the growth exponent") {
  TorusGrid g(512);
  Spectral sp(g);
  auto psi = std::make_shared<SingularPotential>(
      g, std::vector<PoleSpec>{{{0.5, 0.5}, 1.2, Sign::minus}}, sp);
  const auto res = check_curve_integrability(psi, 2.0, 0.2);
  CHECK(res.nu_eff == doctest::Approx(0.6));
  // Through-pole family: fitted exponent >= 1 - nu_eff - 0.05 = 0.35.
  CHECK(res.min_exponent >= 0.35);
  // Off-pole families approach exponent 1 from below.
  CHECK(res.exponents[2] > res.exponents[0]);

  // Out-of-hypothesis rejection.
  CHECK_THROWS_WITH_AS(check_curve_integrability(psi, 1.1, 0.2),
                       doctest::Contains("hypothesis"), std::runtime_error);
}

TEST_CASE("curve integrability: brute-force midpoint oracle agrees") {
  TorusGrid g(512);
  Spectral sp(g);
  auto psi = std::make_shared<SingularPotential>(
      g, std::vector<PoleSpec>{{{0.5, 0.5}, 1.2, Sign::minus}}, sp);
  const double scale = 2.0;
  ConformalMetric m =
      ConformalMetric::scaled_potential(psi, -2.0 / scale, 0.0, "probe");
  // Offset family (smooth integrand): 1e6-point midpoint rule with exact
  // pole-split evaluation, fully independent of the adaptive quadrature.
  const double off = 4.0 * g.h();
  const double L = 0.1;
  const Vec2 a{0.5 - 0.5 * L, 0.5 + off};
  long double acc = 0.0L;
  const int N = 1000000;
  for (int k = 0; k < N; ++k) {
    const double s = (k + 0.5) * L / N;
    acc += std::exp(0.5 * m.log_factor(wrap01({a.x + s, a.y})));
  }
  const double oracle = static_cast<double>(acc) * L / N;
  const double got = segment_length(a, wrap01({a.x + L, a.y}), m);
  CHECK_NEAR(got, oracle, 1e-4 * oracle);

  // Through-pole family: midpoint rule with singularity subtraction. The
  // integrand is w(s)|s-s0|^{-nu_eff}; subtract the frozen-coefficient power
  // law and add its closed form back.
  const Vec2 b{0.5 - 0.5 * L, 0.5};
  const double nu_eff = 0.6;
  const double w0 = std::exp(0.5 * m.log_factor_regular(0, {0.5, 0.5}));
  long double acc2 = 0.0L;
  for (int k = 0; k < N; ++k) {
    const double s = (k + 0.5) * L / N;
    const double r = std::fabs(s - 0.5 * L);
    const double f = std::exp(0.5 * m.log_factor(wrap01({b.x + s, b.y})));
    acc2 += f - w0 * std::pow(r, -nu_eff);
  }
  const double closed_form =
      2.0 * w0 * std::pow(0.5 * L, 1.0 - nu_eff) / (1.0 - nu_eff);
  const double oracle2 = static_cast<double>(acc2) * L / N + closed_form;
  const double got2 = segment_length(b, {0.5, 0.5}, m) +
                      segment_length({0.5, 0.5}, wrap01({b.x + L, b.y}), m);
  CHECK_NEAR(got2, oracle2, 1e-4 * oracle2);
}

TEST_CASE("density lemma: deterministic cases") {
  TorusGrid g(256);
  // Straight segment through the disk center: measure = min(L, 2 rho).
  const double rho = 0.1, L = 0.5;
  double inside = 0.0;
  const double step = g.h() / 8.0;
  for (double s = 0.0; s <= L; s += step)
    if (std::fabs(s - 0.25) <= rho) inside += step;
  CHECK(inside <= std::min(L, 2 * rho) + 2 * step);
  CHECK(inside <= std::min(L, 8 * rho));

  // Circle of radius rho about the center: measure = 2 pi rho <= 8 rho.
  CHECK(2.0 * 3.14159265358979 * rho <= 8.0 * rho);
}

TEST_CASE("density lemma: randomized audit has no violations") {
  TorusGrid g(256);
  const auto audit = check_density_lemma(g, 200, 50, 4242);
  CHECK(audit.violations == 0);
  CHECK(audit.worst_ratio <= 1.01);
  // The bound is genuinely exercised (some disk sees a decent fraction).
  CHECK(audit.worst_ratio > 0.2);
}

TEST_CASE("curvature measure: flat, flow states, and the limit datum") {
  TorusGrid g(256);
  Spectral sp(g);
  ScalarField zero(g, 0.0);
  CHECK(curvature_measure(zero, sp).total == 0.0);
  CHECK(curvature_measure(zero, sp).cell_mass.max_abs() < 1e-15);

  // Truncated limit datum psi_minus = nu G_a: the measure concentrates +nu
  // at the pole against -nu spread uniformly.
  const double nu = 0.8;
  const Vec2 a = g.point(128, 128);
  SingularPotential minus(g, {{a, nu, Sign::minus}}, sp);
  ScalarField u(g);
  const ScalarField um = minus.truncate(10);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = -um[i];
  const CurvatureMeasure mu = curvature_measure(u, sp);
  CHECK(std::fabs(mu.total) < 1e-8);
  const double near = mu.disk_mass(a, 0.2);
  CHECK_NEAR(near, nu * (1.0 - 3.14159265 * 0.2 * 0.2), 0.02);
  CHECK_NEAR(mu.total - near, -nu * (1.0 - 3.14159265 * 0.2 * 0.2), 0.02);
}

TEST_CASE("gauss-bonnet holds on every state of a flow") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  SingularPotential minus(g, {{g.point(64, 64), 0.8, Sign::minus}}, sp);
  Trajectory traj = run_flow(zero, minus, 4, 1.0, 4, sp);
  for (const auto& st : traj.states)
    CHECK(std::fabs(curvature_measure(st.u, sp).total) < 1e-8);
}

TEST_CASE("matched truncation ladder grows then caps with the grid") {
  CHECK(matched_truncation_level(0, 512) == 4);
  CHECK(matched_truncation_level(1, 512) == 4);
  CHECK(matched_truncation_level(2, 512) == 6);
  CHECK(matched_truncation_level(4, 512) == 8);
  CHECK(matched_truncation_level(10, 512) == 8);   // capped
  CHECK(matched_truncation_level(10, 4096) == 12);  // deeper grid, deeper cap
}

TEST_CASE("ricci convergence on the flat scenario is exact") {
  TorusGrid g(128);
  Spectral sp(g);
  auto zero = std::make_shared<SingularPotential>(g);
  Trajectory traj = run_flow(*zero, *zero, 8, 1.0, 4, sp);
  std::vector<FlowState> states(traj.states.begin() + 1, traj.states.end());
  const auto table = ricci_convergence(states, zero, zero, 0.0, sp);
  CHECK(table.final_l1 < 1e-9);
  CHECK(table.final_weak < 1e-9);
}

TEST_CASE("counterexample density: paper constants at level 2") {
  TorusGrid g(512);
  const auto den = counterexample_density(2, g);
  // -ln 4 on the tube, node-wise.
  const double ln4 = std::log(4.0);
  int tube_nodes = 0;
  for (std::size_t i = 0; i < den.psi.size(); ++i) {
    if (den.psi[i] < 0) {
      CHECK(den.psi[i] == doctest::Approx(-ln4));
      ++tube_nodes;
    } else {
      CHECK(den.psi[i] <= ln4);
    }
  }
  CHECK(tube_nodes > 0);

  // Discrete mass is exactly 1.
  long double mass = 0.0L;
  for (std::size_t i = 0; i < den.psi.size(); ++i) mass += std::exp(den.psi[i]);
  CHECK(std::fabs(static_cast<double>(mass / (long double)den.psi.size()) - 1.0) < 1e-6);

  // Weak-convergence budget at level 2.
  CHECK(den.l1_deviation <= 1.1 * 0.25);

  // The carved net is a genuine 2^-j net.
  CHECK(den.snap_radius <= 0.25);
}

TEST_CASE("counterexample density: resolution guard") {
  TorusGrid coarse(512);
  // Level-4 parameters demand a 2048 grid; the tube cannot be carved at 512.
  CHECK_THROWS_WITH_AS(counterexample_density(4, coarse),
                       doctest::Contains("too coarse"), std::runtime_error);
}

TEST_CASE("equicontinuity: flat flow has unit exponent and no drift") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  Trajectory traj = run_flow(zero, zero, 8, 1.0, 3, sp);
  std::vector<FlowState> states(traj.states.begin() + 1, traj.states.end());
  const PairSet pairs = sample_pairs(g, {}, 8, 6, 7);
  const auto table = equicontinuity_fits(states, pairs, 1.0);
  CHECK(table.alpha_min > 0.9);
  CHECK(table.alpha_max < 1.05);
  CHECK(table.constant_drift < 0.05);
}
