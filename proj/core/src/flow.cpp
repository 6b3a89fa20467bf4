#include "krf/flow.hpp"

#include <algorithm>
#include <cmath>

namespace krf {

void FlowState::validate(Spectral& sp, double tol) const {
  ScalarField lap = sp.laplacian(phi);
  double min_density = 1e300, coherence = 0.0;
  long double area = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double dens = 1.0 + lap[i];
    min_density = std::min(min_density, dens);
    coherence = std::max(coherence, std::fabs(u[i] - std::log(dens)));
    area += std::exp(u[i]);
  }
  if (min_density <= 0.0)
    throw std::runtime_error("FlowState: density positivity violated");
  if (coherence > tol)
    throw std::runtime_error("FlowState: u/phi coherence off by " +
                             std::to_string(coherence));
  const double area_err =
      std::fabs(static_cast<double>(area / static_cast<long double>(u.size())) - 1.0);
  if (area_err > 1e-8)
    throw std::runtime_error("FlowState: area conservation off by " +
                             std::to_string(area_err));
}

std::vector<double> ladder_times(double t_end, int depth) {
  std::vector<double> ts;
  for (int k = depth; k >= 0; --k) ts.push_back(t_end * std::ldexp(1.0, -k));
  return ts;
}

FlowState init_state(const SingularPotential& plus, const SingularPotential& minus,
                     int level, Spectral& sp) {
  const ScalarField up = plus.truncate(level);
  const ScalarField um = minus.truncate(level);
  const double c = normalization_constant(up, um);

  const TorusGrid& grid = sp.grid();
  ScalarField rhs(grid);
  ScalarField u0(grid);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    u0[i] = up[i] - um[i] + c;
    rhs[i] = std::exp(u0[i]) - 1.0;
  }
  rhs.make_mean_zero();  // c normalizes the same quadrature; shift is round-off
  FlowState s;
  s.t = 0.0;
  s.level = level;
  s.phi = sp.solve_poisson(rhs);
  ScalarField lap = sp.laplacian(s.phi);
  s.u = ScalarField(grid);
  for (std::size_t i = 0; i < lap.size(); ++i) s.u[i] = std::log1p(lap[i]);
  return s;
}

namespace {

// One Newton attempt at fixed dt. Returns false on divergence or loss of
// positivity; on success fills phi_next/u_next.
bool newton_attempt(const FlowState& state, double dt, Spectral& sp,
                    const StepControls& ctl, ScalarField& phi_next,
                    ScalarField& u_next) {
  const std::size_t N = state.phi.size();
  ScalarField phi = state.phi;
  // Predictor: explicit Euler on the current log-density.
  for (std::size_t i = 0; i < N; ++i) phi[i] += dt * state.u[i];

  ScalarField lap(state.phi.grid());
  ScalarField resid(state.phi.grid());
  ScalarField diag(state.phi.grid());  // 1 + lap = e^{u}, the M^{-1} weight

  for (int it = 0; it < ctl.max_newton; ++it) {
    lap = sp.laplacian(phi);
    double min_density = 1e300;
    for (std::size_t i = 0; i < N; ++i) min_density = std::min(min_density, 1.0 + lap[i]);
    if (min_density <= 1e-12) return false;

    double rmax = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      diag[i] = 1.0 + lap[i];
      resid[i] = phi[i] - state.phi[i] - dt * std::log1p(lap[i]);
      rmax = std::max(rmax, std::fabs(resid[i]));
    }

    // Solve (M^{-1} - dt lap) delta = -M^{-1} resid by PCG, M^{-1} = diag,
    // preconditioned by the constant-coefficient spectral surrogate.
    double mean_u = 0.0;
    for (std::size_t i = 0; i < N; ++i) mean_u += std::log(diag[i]);
    const double mu = std::exp(mean_u / static_cast<double>(N));

    ScalarField b(state.phi.grid());
    for (std::size_t i = 0; i < N; ++i) b[i] = -diag[i] * resid[i];

    ScalarField delta(state.phi.grid());  // start from 0
    ScalarField r = b;
    ScalarField z = sp.solve_helmholtz(r, mu, dt);
    ScalarField p = z;
    double rz = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      rz += r[i] * z[i];
      bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    const double target = std::max(ctl.pcg_tol * bnorm, 1e-300);

    for (int cg = 0; cg < ctl.max_pcg; ++cg) {
      ScalarField Ap = sp.laplacian(p);
      for (std::size_t i = 0; i < N; ++i) Ap[i] = diag[i] * p[i] - dt * Ap[i];
      double pAp = 0.0;
      for (std::size_t i = 0; i < N; ++i) pAp += p[i] * Ap[i];
      if (pAp <= 0.0) break;
      const double alpha = rz / pAp;
      double rnorm = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        delta[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
        rnorm += r[i] * r[i];
      }
      if (std::sqrt(rnorm) <= target) break;
      z = sp.solve_helmholtz(r, mu, dt);
      double rz_new = 0.0;
      for (std::size_t i = 0; i < N; ++i) rz_new += r[i] * z[i];
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
    }

    double dmax = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      phi[i] += delta[i];
      dmax = std::max(dmax, std::fabs(delta[i]));
    }
    if (!std::isfinite(dmax)) return false;
    if (dmax <= ctl.newton_tol) {
      lap = sp.laplacian(phi);
      double mind = 1e300;
      for (std::size_t i = 0; i < N; ++i) mind = std::min(mind, 1.0 + lap[i]);
      if (mind <= 0.0) return false;
      phi_next = phi;
      u_next = ScalarField(state.phi.grid());
      for (std::size_t i = 0; i < N; ++i) u_next[i] = std::log1p(lap[i]);
      return true;
    }
  }
  return false;
}

}  // namespace

FlowState step(const FlowState& state, double dt, Spectral& sp,
               const StepControls& controls) {
  double try_dt = dt;
  for (int halvings = 0; halvings <= controls.max_halvings; ++halvings) {
    ScalarField phi_next, u_next;
    if (newton_attempt(state, try_dt, sp, controls, phi_next, u_next)) {
      FlowState next;
      next.t = state.t + try_dt;
      next.level = state.level;
      next.phi = std::move(phi_next);
      next.u = std::move(u_next);
      return next;
    }
    try_dt *= 0.5;
  }
  throw StiffStepError(state.t, dt);
}

Trajectory run_flow(const SingularPotential& plus, const SingularPotential& minus,
                    int level, double t_end, int ladder_depth, Spectral& sp,
                    const StepControls& controls) {
  if (t_end > 1.0 + 1e-15)
    throw std::invalid_argument("run_flow: t_end must not exceed 1");

  Trajectory traj;
  traj.level = level;

  const ScalarField up = plus.truncate(level);
  const ScalarField um = minus.truncate(level);
  traj.c_level = normalization_constant(up, um);

  // Raw minus potential weight for the gradient-bound column.
  const TorusGrid& grid = sp.grid();
  std::vector<double> gamma_weight(grid.size());
  for (int j = 0; j < grid.n(); ++j)
    for (int i = 0; i < grid.n(); ++i) {
      const double v = minus.eval(grid.point(i, j));
      gamma_weight[grid.index(i, j)] = std::isfinite(v) ? std::exp(v) : 0.0;
    }

  FlowState s = init_state(plus, minus, level, sp);
  traj.states.push_back(s);

  double min_density = 1e300;
  for (std::size_t i = 0; i < s.u.size(); ++i)
    min_density = std::min(min_density, std::exp(s.u[i]));
  double dt = std::min(1e-4, grid.h() * grid.h() * 3.14159265358979323846 * min_density);

  const std::vector<double> targets = ladder_times(t_end, ladder_depth);
  for (double target : targets) {
    while (s.t < target * (1.0 - 1e-12)) {
      const double dt_step = std::min(dt, target - s.t);
      FlowState next = step(s, dt_step, sp, controls);
      const double advanced = next.t - s.t;
      s = std::move(next);
      if (advanced >= dt_step * (1.0 - 1e-12))
        dt = std::min(controls.dt_max, dt * controls.dt_growth);
      else
        dt = advanced;  // a halving happened; stay conservative
    }
    s.t = target;  // suppress accumulated round-off in the time variable
    traj.states.push_back(s);
    traj.rows.push_back(diagnostics(s, up, um, gamma_weight, sp));
  }
  fill_second_differences(traj);
  return traj;
}

DiagnosticsRow diagnostics(const FlowState& state, const ScalarField& plus_trunc,
                           const ScalarField& minus_trunc,
                           const std::vector<double>& gamma_weight, Spectral& sp) {
  DiagnosticsRow row;
  row.t = state.t;
  row.phi_min = state.phi.min();
  row.phi_max = state.phi.max();

  const std::size_t N = state.u.size();
  long double area = 0.0L, mass = 0.0L, i2 = 0.0L;
  double bp = -1e300, bm = -1e300;
  for (std::size_t i = 0; i < N; ++i) {
    const double u = state.u[i];
    area += std::exp(u);
    mass += u;
    i2 += std::exp(2.0 * u);
    bp = std::max(bp, plus_trunc[i] - u);
    bm = std::max(bm, u + minus_trunc[i]);
  }
  row.area_err = std::fabs(static_cast<double>(area / static_cast<long double>(N)) - 1.0);
  row.mass = static_cast<double>(mass / static_cast<long double>(N));
  row.i2 = static_cast<double>(i2 / static_cast<long double>(N));
  row.b_plus = bp;
  row.b_minus = bm;

  ScalarField gx, gy;
  sp.gradient(state.u, gx, gy);
  double g = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    g = std::max(g, std::hypot(gx[i], gy[i]) * gamma_weight[i]);
  row.gamma = g;
  return row;
}

void fill_second_differences(Trajectory& traj) {
  // rows correspond to states[1..]; interior rows get the nonuniform stencil.
  for (std::size_t r = 0; r + 1 < traj.rows.size(); ++r) {
    if (r == 0) continue;
    const FlowState& a = traj.states[r];      // t_{k-1}
    const FlowState& b = traj.states[r + 1];  // t_k
    const FlowState& c = traj.states[r + 2];  // t_{k+1}
    const double dm = b.t - a.t, dp = c.t - b.t;
    double m = -1e300;
    for (std::size_t i = 0; i < b.phi.size(); ++i) {
      const double dd = 2.0 * (a.phi[i] / (dm * (dm + dp)) - b.phi[i] / (dm * dp) +
                               c.phi[i] / (dp * (dm + dp)));
      m = std::max(m, dd);
    }
    traj.rows[r].d2 = m;
  }
}

}  // namespace krf
