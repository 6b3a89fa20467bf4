#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krf/green.hpp"
#include "krf/spectral.hpp"
#include "krf/torus.hpp"

namespace krf {

enum class Sign { plus, minus };

/// One logarithmic pole: location, Lelong number, and which side of the
/// density it belongs to (plus: density vanishes; minus: density blows up).
struct PoleSpec {
  Vec2 pos;
  double nu = 0.0;
  Sign sign = Sign::minus;
};

/// Validate a combined pole list: distinct plus/minus locations, no cusp
/// (every minus pole has nu < 2), pairwise separation >= 8h.
/// Throws std::runtime_error with a named reason on violation.
void validate_poles(const std::vector<PoleSpec>& poles, const TorusGrid& grid);

/// Quasi-subharmonic potential: sum of nu_j * G_{a_j} over one-signed poles
/// plus a smooth residual field. Evaluation is exact off poles through the
/// Green split and -inf exactly at pole locations.
class SingularPotential {
public:
  /// Empty (identically zero) potential on a grid.
  explicit SingularPotential(TorusGrid grid);
  /// Potential with poles; Green functions are built on the given engine.
  SingularPotential(TorusGrid grid, std::vector<PoleSpec> poles, Spectral& spectral);
  SingularPotential(TorusGrid grid, std::vector<PoleSpec> poles, Spectral& spectral,
                    ScalarField smooth_residual);

  const TorusGrid& grid() const { return grid_; }
  const std::vector<PoleSpec>& poles() const { return poles_; }
  std::size_t pole_count() const { return poles_.size(); }
  bool empty() const { return poles_.empty() && !smooth_; }

  /// Quasi-psh constant A = sum of Lelong numbers (safe overestimate).
  double qpsh_constant() const;
  /// Largest Lelong number over the poles (0 if none).
  double max_nu() const;

  double eval(Vec2 z) const;
  /// eval minus the k-th pole's own log term; finite and smooth near pole k.
  double eval_regular_at(std::size_t k, Vec2 z) const;

  /// Smoothed truncation psi^(level) = softmax(psi, -level), stiffness 4,
  /// sampled at grid nodes. Node-wise decreasing in the level.
  ScalarField truncate(int level) const;

  const GreenFunction& green(std::size_t k) const { return *greens_[k]; }

private:
  TorusGrid grid_;
  std::vector<PoleSpec> poles_;
  std::vector<std::shared_ptr<const GreenFunction>> greens_;
  std::optional<ScalarField> smooth_;
};

/// Soft maximum with stiffness s: log(e^{s a} + e^{s b}) / s.
double soft_max(double a, double b, double stiffness = 4.0);

/// Result of the circle-mean Lelong estimator.
struct LelongFit {
  double nu_hat = 0.0;
  double fit_residual = 0.0;
};

/// Least-squares slope of circle means of psi against log r over radii
/// {4h, 8h, 16h, 32h} about the probe point. Rejects probes whose sampling
/// circles collide with another pole's 4h disk.
LelongFit lelong_estimate(const SingularPotential& psi, Vec2 probe);

/// Mass normalization: c with integral of e^{psi_plus - psi_minus + c} equal
/// to 1. Pole disks are integrated in polar coordinates against a smooth
/// partition of unity; the remainder by grid quadrature. Rejects cusps.
double normalization_constant(const SingularPotential& plus,
                              const SingularPotential& minus);

/// Discrete-grid variant for truncated (bounded) data: c = -log mean(e^{up-um}).
double normalization_constant(const ScalarField& plus_trunc,
                              const ScalarField& minus_trunc);

/// Integrability probe: partial sums of the polar quadrature of e^{-psi}
/// around pole k with an increasing number of geometric panels. Converges
/// for nu < 2 and grows without bound for nu >= 2.
std::vector<double> pole_mass_partial_sums(const SingularPotential& minus,
                                           std::size_t k, int max_panels);

}  // namespace krf
