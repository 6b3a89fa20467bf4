#pragma once

#include <memory>

#include "krf/spectral.hpp"
#include "krf/torus.hpp"

namespace krf {

/// Periodic Green function G_a with lap(G_a) = delta_a - 1 and zero mean.
///
/// Stored as an analytic-log + smooth-correction split,
///   G_a(z) = eta(r) log r + R(z),  r = |z - a| (minimal image),
/// with eta a C^6 radial cutoff, identically 1 for r <= 1/8 and 0 for
/// r >= 1/4, and R solved spectrally. The split evaluates G_a at arbitrary
/// off-grid points: the log term is exact, R is interpolated bicubically.
/// Grid sampling alone cannot resolve the log pole; every consumer that
/// walks curves or disks through a pole goes through this split.
class GreenFunction {
public:
  GreenFunction(TorusGrid grid, Vec2 a, Spectral& spectral);

  Vec2 pole() const { return a_; }
  const TorusGrid& grid() const { return grid_; }

  /// G_a(z); -inf exactly at the pole.
  double eval(Vec2 z) const;

  /// G_a(z) - log|z - a|: the smooth-at-the-pole remainder. Equals the
  /// correction field R inside the inner cutoff radius.
  double eval_minus_log(Vec2 z) const;

  /// The correction value at the pole itself (the local-log descriptor:
  /// G_a(z) = log|z - a| + correction_at_pole() + O(|z - a|^2)).
  double correction_at_pole() const;

  /// Accurate integral of G over the torus (pole-aware); ~0 by construction.
  double integral() const;

  /// Mean of G over the circle of radius r about the pole (m angular samples).
  double circle_mean(double r, int m = 64) const;

  static double cutoff_inner_radius() { return 0.125; }
  static double cutoff_outer_radius() { return 0.25; }

private:
  TorusGrid grid_;
  Vec2 a_;
  ScalarField correction_;
};

}  // namespace krf
