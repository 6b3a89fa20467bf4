#pragma once

#include <memory>

#include "krf/torus.hpp"

namespace krf {

/// Fourier-multiplier solver on the periodic grid.
///
/// The Laplacian convention carries the 1/2pi factor of the area-form
/// normalization, so lap(f) = (1/2pi) * (f_xx + f_yy) and log|z - a| has
/// unit point mass: lap(log r) = delta_a. Solves are exact up to round-off
/// for grid-resolved modes; no iteration, no tolerance tuning.
///
/// One Spectral instance owns FFT plans and scratch buffers for a fixed n;
/// it is not safe to share a single instance across threads concurrently,
/// but distinct instances are independent.
class Spectral {
public:
  explicit Spectral(TorusGrid grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const TorusGrid& grid() const { return grid_; }

  /// lap(f), output mean zero to round-off.
  ScalarField laplacian(const ScalarField& f);

  /// Unique mean-zero phi with lap(phi) = rhs.
  /// Rejects rhs whose mean exceeds 1e-10 in absolute value.
  ScalarField solve_poisson(const ScalarField& rhs);

  /// Spectral partial derivatives.
  void gradient(const ScalarField& f, ScalarField& fx, ScalarField& fy);

  /// Solve (c0*I - dt*lap) phi = rhs, c0 > 0. Used as flow preconditioner.
  ScalarField solve_helmholtz(const ScalarField& rhs, double c0, double dt);

private:
  struct Impl;
  TorusGrid grid_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace krf
