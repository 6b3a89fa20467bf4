#pragma once

#include <stdexcept>
#include <vector>

#include "krf/potential.hpp"
#include "krf/spectral.hpp"
#include "krf/torus.hpp"

namespace krf {

/// One snapshot of the conformal flow: potential phi and log-density
/// u = log(1 + lap(phi)), with e^{u} the area density of the evolving form.
/// States are immutable snapshots; stepping produces new ones.
struct FlowState {
  double t = 0.0;
  ScalarField phi;
  ScalarField u;
  int level = 0;  // truncation index of the initial datum

  /// Coherence: positivity of 1 + lap(phi), area conservation, u identity.
  void validate(Spectral& sp, double tol = 1e-9) const;
};

struct StepControls {
  double newton_tol = 1e-11;
  int max_newton = 30;
  int max_halvings = 10;
  int max_pcg = 500;
  double pcg_tol = 1e-14;
  double dt_growth = 1.35;
  double dt_max = 0.05;
};

/// Raised when a step keeps diverging after the allowed dt halvings.
class StiffStepError : public std::runtime_error {
public:
  StiffStepError(double t, double dt)
      : std::runtime_error("stiff step at t = " + std::to_string(t) +
                           ", dt = " + std::to_string(dt)),
        t(t), dt(dt) {}
  double t;
  double dt;
};

/// Per-ladder-time diagnostic row; all integrals are grid quadrature.
struct DiagnosticsRow {
  double t = 0.0;
  double phi_min = 0.0, phi_max = 0.0;
  double area_err = 0.0;       // |int e^u - 1|
  double mass = 0.0;           // M(t) = int u
  double i2 = 0.0;             // I_2(t) = int e^{2u}
  double b_plus = 0.0;         // max(psi_plus^(j) - u)
  double b_minus = 0.0;        // max(u + psi_minus^(j))
  double d2 = 0.0;             // max nodewise second time-difference of phi
  double gamma = 0.0;          // max |grad u| e^{psi_minus}
};

struct Trajectory {
  std::vector<FlowState> states;  // ascending times; states[0] is t = 0
  std::vector<DiagnosticsRow> rows;
  int level = 0;
  double c_level = 0.0;  // normalization constant of the truncated pair
};

/// Ladder times t_end * 2^{-k}, k = depth..0, ascending.
std::vector<double> ladder_times(double t_end, int depth);

/// Initial state: solve lap(phi0) = e^{psi_plus^(j) - psi_minus^(j) + c_j} - 1
/// with c_j normalizing the truncated pair on the grid.
FlowState init_state(const SingularPotential& plus, const SingularPotential& minus,
                     int level, Spectral& sp);

/// One backward-Euler step phi+ = phi + dt log(1 + lap(phi+)), solved by
/// Newton with spectrally preconditioned conjugate-gradient linear solves.
/// Halves dt on divergence (up to controls.max_halvings); the returned state
/// records the time actually reached.
FlowState step(const FlowState& state, double dt, Spectral& sp,
               const StepControls& controls = {});

/// Integrate from the truncated datum, snapshotting every ladder time up to
/// t_end <= 1. Adaptive dt seeded at min(1e-4, pi h^2 min e^{u0}).
Trajectory run_flow(const SingularPotential& plus, const SingularPotential& minus,
                    int level, double t_end, int ladder_depth, Spectral& sp,
                    const StepControls& controls = {});

/// Diagnostics for one state against the run's truncated data. gamma_weight
/// holds e^{psi_minus} at nodes (zero where the raw potential dives).
DiagnosticsRow diagnostics(const FlowState& state, const ScalarField& plus_trunc,
                           const ScalarField& minus_trunc,
                           const std::vector<double>& gamma_weight, Spectral& sp);

/// Fill the d2 column of rows from the phi snapshots (3-point nonuniform
/// second differences across adjacent ladder states).
void fill_second_differences(Trajectory& traj);

}  // namespace krf
