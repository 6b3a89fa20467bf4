#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krf/metric.hpp"
#include "krf/torus.hpp"

namespace krf {

/// Single-source distances over the grid under a conformal metric.
struct DistanceField {
  Vec2 source;
  ScalarField values;
  std::string method;      // "eikonal" | "lattice"
  std::string metric_tag;
  double t_or_limit = -1.0;  // flow time, or -1 for the limit current

  double at_point(Vec2 p) const { return values.interp_bilinear(p); }
};

/// First-order upwind fast marching on the periodic grid (8-neighbor
/// triangulated updates). Near-pole cells seed from the analytic radial
/// model through virtual pole vertices instead of one-sided differences.
/// Primary method.
DistanceField eikonal_distance(const ConformalMetric& m, Vec2 source);

/// Exact Dijkstra shortest path on the 16-neighbor periodic grid graph
/// (king + knight moves), edge weights from curve quadrature on straight
/// edges, lexicographic tie-breaking. Oracle method; the stencil's
/// worst-direction metrication error is kLatticeAnisotropyBound.
DistanceField lattice_distance(const ConformalMetric& m, Vec2 source);

/// Worst-direction length overestimate of the 16-neighbor stencil:
/// 1/cos(atan(1/2)/2) - 1, just under 2.8 percent.
inline constexpr double kLatticeAnisotropyBound = 0.02749;

/// d_T for the limit current T = e^{psi_plus - psi_minus} * flat: eikonal
/// with pole-aware seeding on u = psi_plus - psi_minus + c. Rejects cusps.
DistanceField dT_distance(std::shared_ptr<const SingularPotential> plus,
                          std::shared_ptr<const SingularPotential> minus,
                          double c, Vec2 source);

/// Power-law fit of an envelope between two distance sets.
struct HolderFit {
  double exponent = 0.0;   // least-squares slope of log dA vs log dB
  double constant = 0.0;   // envelope constant at the fitted exponent
  double residual = 0.0;   // rms log residual of the least-squares fit
  bool upper = true;       // direction of the envelope
};

/// Fit log dA <=/>= alpha log dB + log C over paired values. Requires at
/// least 20 pairs with dB spanning two decades.
HolderFit holder_fit(const std::vector<double>& dA, const std::vector<double>& dB,
                     bool upper_envelope);

/// Envelope constant at a prescribed exponent (no span requirement).
double envelope_constant(const std::vector<double>& dA, const std::vector<double>& dB,
                         double alpha, bool upper_envelope);

/// Least-squares slope of log(d(r)) against log(r): d sampled from the field
/// by angular averaging on circles about the center.
double radial_exponent_fit(const DistanceField& d, Vec2 center, double r_min,
                           double r_max, int n_radii = 12, int n_angles = 16);

/// Max over pairs of |d1 - d2| where both fields share a source.
double sup_discrepancy(const DistanceField& d1, const DistanceField& d2,
                       const std::vector<Vec2>& targets);

}  // namespace krf
