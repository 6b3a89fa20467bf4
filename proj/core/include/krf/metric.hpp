#pragma once

#include <memory>
#include <string>
#include <vector>

#include "krf/potential.hpp"
#include "krf/torus.hpp"

namespace krf {

/// Pole annotation on a metric density: e^{u} ~ r^{exponent} near pos.
/// Plus poles carry exponent +nu (cone, vanishing density), minus poles
/// -nu (spike, blowing density).
struct MetricPole {
  Vec2 pos;
  double exponent = 0.0;
};

/// Conformal metric e^{u} * (flat): length element e^{u/2}.
///
/// u is either a grid field (smooth case, e.g. a flow slice) or a weighted
/// combination of singular potentials plus a constant (the limit current,
/// and the rescaled potentials used by the integrability checks).
class ConformalMetric {
public:
  static ConformalMetric flat(TorusGrid grid);
  static ConformalMetric from_field(ScalarField u, std::string tag);
  /// u = psi_plus - psi_minus + c.
  static ConformalMetric from_pair(std::shared_ptr<const SingularPotential> plus,
                                   std::shared_ptr<const SingularPotential> minus,
                                   double c, std::string tag);
  /// u = coef * psi + c0 (any real coef; poles annotate as coef * nu).
  static ConformalMetric scaled_potential(std::shared_ptr<const SingularPotential> psi,
                                          double coef, double c0, std::string tag);

  const TorusGrid& grid() const { return grid_; }
  const std::string& tag() const { return tag_; }
  const std::vector<MetricPole>& poles() const { return poles_; }

  /// Log conformal factor u(z); +-inf at poles.
  double log_factor(Vec2 z) const;
  /// u(z) - exponent_k * log|z - a_k|, finite near pole k.
  double log_factor_regular(std::size_t k, Vec2 z) const;
  /// Length element e^{u/2} (may be 0 or +inf at poles).
  double length_element(Vec2 z) const { return std::exp(0.5 * log_factor(z)); }

  /// Pole-disk radius used by curve quadrature and solver seeding.
  double pole_disk_radius() const;

  bool is_field() const { return field_.has_value(); }
  const ScalarField& field() const { return *field_; }

private:
  TorusGrid grid_;
  std::string tag_;
  std::optional<ScalarField> field_;
  struct Term {
    std::shared_ptr<const SingularPotential> psi;
    double coef;
  };
  std::vector<Term> terms_;
  double constant_ = 0.0;
  std::vector<MetricPole> poles_;
  std::vector<std::pair<std::size_t, std::size_t>> pole_src_;  // (term, pole idx)
};

/// Ordered points of the fundamental domain; each segment runs along the
/// minimal-image straight line from the previous point.
class Polyline {
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> pts);

  const std::vector<Vec2>& points() const { return pts_; }
  std::size_t segments() const { return pts_.empty() ? 0 : pts_.size() - 1; }
  /// Unwrapped displacement of segment s.
  Vec2 segment_delta(std::size_t s) const;
  double flat_length() const { return flat_length_; }

  bool arc_length_flag() const { return arc_length_; }
  void set_arc_length_flag(bool f) { arc_length_ = f; }

private:
  std::vector<Vec2> pts_;
  double flat_length_ = 0.0;
  bool arc_length_ = false;
};

/// Length of gamma under the metric: adaptive Gauss quadrature of e^{u/2},
/// subdivided until the relative change is below rel_tol. Pieces inside a
/// pole's disk that end at the pole integrate the local model r^{exponent/2}
/// with the regular factor quadrature; a segment crossing a pole strictly
/// inside is rejected (split it at the pole first).
double curve_length(const Polyline& gamma, const ConformalMetric& m,
                    double rel_tol = 1e-7);

/// Length of the straight minimal-image segment from p to q.
double segment_length(Vec2 p, Vec2 q, const ConformalMetric& m,
                      double rel_tol = 1e-7);

/// As segment_length, but splits at poles the segment passes through
/// exactly (the graph solvers hit these on half-cell-aligned pole rows).
double segment_length_split(Vec2 p, Vec2 q, const ConformalMetric& m,
                            double rel_tol = 1e-7);

}  // namespace krf
