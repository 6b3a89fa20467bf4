#include <cmath>
#include <memory>

#include "doctest.h"
#include "krf/flow.hpp"
#include "test_util.hpp"

using namespace krf;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("ladder times are the ascending geometric grid") {
  auto ts = ladder_times(1.0, 3);
  REQUIRE(ts.size() == 4);
  CHECK(ts[0] == doctest::Approx(0.125));
  CHECK(ts[3] == doctest::Approx(1.0));
}

TEST_CASE("init: flat datum gives the zero state") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  FlowState s = init_state(zero, zero, 4, sp);
  CHECK(s.phi.max_abs() < 1e-11);
  CHECK(s.u.max_abs() < 1e-11);
  CHECK_NOTHROW(s.validate(sp));
}

TEST_CASE("init: truncation floor propagates into the log-density") {
  TorusGrid g(256);
  Spectral sp(g);
  SingularPotential zero(g);
  SingularPotential minus(g, {{g.point(128, 128), 1.0, Sign::minus}}, sp);
  const int j = 6;
  FlowState s = init_state(zero, minus, j, sp);

  const ScalarField up = zero.truncate(j);
  const ScalarField um = minus.truncate(j);
  const double c = normalization_constant(up, um);
  // u0 matches the truncated density node-wise.
  double coh = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i)
    coh = std::max(coh, std::fabs(s.u[i] - (up[i] - um[i] + c)));
  CHECK(coh < 1e-9);
  CHECK(s.u.min() >= -j + c - 0.1);

  // Solver contract: residual of the initial Poisson solve.
  ScalarField lap = sp.laplacian(s.phi);
  double resid = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i)
    resid = std::max(resid, std::fabs(lap[i] - (std::exp(up[i] - um[i] + c) - 1.0)));
  CHECK(resid < 1e-9);
}

TEST_CASE("step: the flat state is stationary") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  FlowState s = init_state(zero, zero, 4, sp);
  FlowState s1 = step(s, 0.01, sp);
  CHECK(s1.t == doctest::Approx(0.01));
  CHECK(s1.phi.max_abs() < 1e-10);
  CHECK(s1.u.max_abs() < 1e-10);
}

TEST_CASE("step: linearized single-mode decay at rate e^{-2 pi t}") {
  TorusGrid g(128);
  Spectral sp(g);
  const double eps = 1e-3;
  FlowState s;
  s.t = 0.0;
  s.level = 0;
  s.phi = ScalarField(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i)
      s.phi.at(i, j) = eps * std::cos(kTwoPi * i * g.h()) / (-kTwoPi);
  ScalarField lap = sp.laplacian(s.phi);
  s.u = ScalarField(g);
  for (std::size_t i = 0; i < lap.size(); ++i) s.u[i] = std::log1p(lap[i]);

  const double dt = 1e-3;
  const double t_end = 0.2;
  const int steps = static_cast<int>(t_end / dt + 0.5);
  for (int k = 0; k < steps; ++k) s = step(s, dt, sp);
  CHECK(s.t == doctest::Approx(0.2).epsilon(1e-12));
  const double amp = s.u.max_abs();
  const double want = eps * std::exp(-kTwoPi * 0.2);
  CHECK(std::fabs(amp / want - 1.0) < 0.02);
}

TEST_CASE("step: area is conserved over many steps") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  SingularPotential minus(g, {{g.point(64, 64), 0.8, Sign::minus}}, sp);
  FlowState s = init_state(zero, minus, 4, sp);
  for (int k = 0; k < 100; ++k) s = step(s, 2e-4, sp);
  long double area = 0.0L;
  for (std::size_t i = 0; i < s.u.size(); ++i) area += std::exp(s.u[i]);
  CHECK(std::fabs(static_cast<double>(area / static_cast<long double>(s.u.size())) - 1.0) <
        1e-8);
  CHECK_NOTHROW(s.validate(sp));
}

TEST_CASE("run_flow: flat scenario is trivial at every ladder time") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  // Level 8: the soft-max residue e^{-4(j-1)} sits below every tolerance.
  Trajectory traj = run_flow(zero, zero, 8, 1.0, 6, sp);
  REQUIRE(traj.states.size() == 8);  // t=0 plus 7 ladder times
  for (const auto& st : traj.states) CHECK(st.u.max_abs() <= 1e-10);
  for (const auto& row : traj.rows) {
    CHECK(std::fabs(row.mass) < 1e-9);
    CHECK(std::fabs(row.i2 - 1.0) < 1e-9);
    CHECK(row.area_err < 1e-12);
    CHECK(std::fabs(row.b_plus) < 1e-9);
    CHECK(std::fabs(row.b_minus) < 1e-9);
    CHECK(row.gamma < 1e-9);
  }
}

TEST_CASE("run_flow: near-cusp scenario estimates") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  SingularPotential minus(g, {{g.point(64, 64), 0.8, Sign::minus}}, sp);
  Trajectory traj = run_flow(zero, minus, 4, 1.0, 8, sp);

  const FlowState& s0 = traj.states[0];
  const double lo = s0.phi.min(), hi = s0.phi.max();
  for (const auto& st : traj.states) {
    CHECK(st.phi.min() >= lo - 1e-7);
    CHECK(st.phi.max() <= hi + 1e-7);
  }
  // phi_t -> phi_0 uniformly as t -> 0 along the ladder.
  double prev = 0.0;
  for (std::size_t k = traj.states.size() - 1; k >= 1; --k) {
    double dev = 0.0;
    for (std::size_t i = 0; i < s0.phi.size(); ++i)
      dev = std::max(dev, std::fabs(traj.states[k].phi[i] - s0.phi[i]));
    if (k < traj.states.size() - 1) CHECK(dev <= prev + 1e-6);
    prev = dev;
  }
  CHECK(prev < 0.05);  // smallest ladder time is close to the datum

  // Monotone functionals along the flow.
  for (std::size_t r = 1; r < traj.rows.size(); ++r) {
    CHECK(traj.rows[r].i2 <= traj.rows[r - 1].i2 * (1.0 + 1e-6));
    CHECK(traj.rows[r].mass >= traj.rows[r - 1].mass - 1e-6 * std::fabs(traj.rows[r - 1].mass));
    CHECK(traj.rows[r].area_err < 1e-8);
  }

  // Two-sided log-density bounds stay level across truncation levels.
  Trajectory traj6 = run_flow(zero, minus, 6, 1.0, 8, sp);
  for (std::size_t r = 0; r < traj.rows.size(); ++r) {
    CHECK(std::fabs(traj.rows[r].b_plus) < 5.0);
    CHECK(std::fabs(traj6.rows[r].b_plus) < 5.0);
    CHECK(std::fabs(traj.rows[r].b_minus) < 5.0);
    CHECK(std::fabs(traj6.rows[r].b_minus) < 5.0);
  }
}

TEST_CASE("run_flow: truncation sweep is a stability regression") {
  // Trajectories from adjacent truncation levels stay within the gap of
  // their initial data (comparison heuristic used as a regression).
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  SingularPotential minus(g, {{{0.5 + 1.0 / 256, 0.5}, 0.8, Sign::minus}}, sp);
  Trajectory t4 = run_flow(zero, minus, 4, 1.0, 6, sp);
  Trajectory t6 = run_flow(zero, minus, 6, 1.0, 6, sp);
  double init_gap = 0.0;
  for (std::size_t i = 0; i < t4.states[0].phi.size(); ++i)
    init_gap = std::max(init_gap,
                        std::fabs(t4.states[0].phi[i] - t6.states[0].phi[i]));
  for (std::size_t k = 1; k < t4.states.size(); ++k) {
    double gap = 0.0;
    for (std::size_t i = 0; i < t4.states[k].phi.size(); ++i)
      gap = std::max(gap, std::fabs(t4.states[k].phi[i] - t6.states[k].phi[i]));
    CHECK(gap <= init_gap * 1.05 + 1e-9);
  }
}

TEST_CASE("run_flow rejects t_end beyond 1") {
  TorusGrid g(128);
  Spectral sp(g);
  SingularPotential zero(g);
  CHECK_THROWS_AS(run_flow(zero, zero, 4, 2.0, 4, sp), std::invalid_argument);
}
