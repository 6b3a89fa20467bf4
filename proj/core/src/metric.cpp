#include "krf/metric.hpp"

#include <cmath>
#include <stdexcept>

#include "krf/quadrature.hpp"

namespace krf {

ConformalMetric ConformalMetric::flat(TorusGrid grid) {
  ConformalMetric m;
  m.grid_ = grid;
  m.tag_ = "flat";
  m.field_ = ScalarField(grid, 0.0);
  return m;
}

ConformalMetric ConformalMetric::from_field(ScalarField u, std::string tag) {
  ConformalMetric m;
  m.grid_ = u.grid();
  m.tag_ = std::move(tag);
  m.field_ = std::move(u);
  return m;
}

ConformalMetric ConformalMetric::from_pair(std::shared_ptr<const SingularPotential> plus,
                                           std::shared_ptr<const SingularPotential> minus,
                                           double c, std::string tag) {
  ConformalMetric m;
  m.grid_ = plus->grid();
  m.tag_ = std::move(tag);
  m.terms_.push_back({std::move(plus), +1.0});
  m.terms_.push_back({std::move(minus), -1.0});
  m.constant_ = c;
  for (std::size_t t = 0; t < m.terms_.size(); ++t) {
    const auto& psi = *m.terms_[t].psi;
    for (std::size_t k = 0; k < psi.pole_count(); ++k) {
      m.poles_.push_back({psi.poles()[k].pos, m.terms_[t].coef * psi.poles()[k].nu});
      m.pole_src_.push_back({t, k});
    }
  }
  return m;
}

ConformalMetric ConformalMetric::scaled_potential(
    std::shared_ptr<const SingularPotential> psi, double coef, double c0,
    std::string tag) {
  ConformalMetric m;
  m.grid_ = psi->grid();
  m.tag_ = std::move(tag);
  m.terms_.push_back({std::move(psi), coef});
  m.constant_ = c0;
  const auto& p = *m.terms_[0].psi;
  for (std::size_t k = 0; k < p.pole_count(); ++k) {
    m.poles_.push_back({p.poles()[k].pos, coef * p.poles()[k].nu});
    m.pole_src_.push_back({0, k});
  }
  return m;
}

double ConformalMetric::log_factor(Vec2 z) const {
  if (field_) return field_->interp_bicubic(z);
  double v = constant_;
  for (const auto& t : terms_) v += t.coef * t.psi->eval(z);
  return v;
}

double ConformalMetric::log_factor_regular(std::size_t k, Vec2 z) const {
  const auto [ti, pi] = pole_src_.at(k);
  double v = constant_;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    if (t == ti)
      v += terms_[t].coef * terms_[t].psi->eval_regular_at(pi, z);
    else
      v += terms_[t].coef * terms_[t].psi->eval(z);
  }
  return v;
}

double ConformalMetric::pole_disk_radius() const {
  double r = 4.0 * grid_.h();
  double sep = 1.0;
  for (std::size_t i = 0; i < poles_.size(); ++i)
    for (std::size_t j = i + 1; j < poles_.size(); ++j)
      sep = std::min(sep, flat_distance(poles_[i].pos, poles_[j].pos));
  return std::min(r, 0.45 * sep);
}

Polyline::Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  for (auto& p : pts_) p = wrap01(p);
  for (std::size_t s = 0; s + 1 < pts_.size(); ++s) {
    const double len = flat_distance(pts_[s], pts_[s + 1]);
    if (len == 0.0)
      throw std::invalid_argument("Polyline: consecutive points must be distinct");
    flat_length_ += len;
  }
  if (flat_length_ <= 0.0) throw std::invalid_argument("Polyline: empty path");
}

Vec2 Polyline::segment_delta(std::size_t s) const {
  return torus_delta(pts_[s], pts_[s + 1]);
}

namespace {

struct PoleHit {
  std::size_t pole;
  double t_center;  // segment parameter of closest approach
  double t_in, t_out;
  double dist;      // closest distance to the pole
};

// Closest approach of the straight segment p + t*delta (t in [0,1]) to any
// minimal image of the pole.
PoleHit closest_approach(Vec2 p, Vec2 delta, double len, std::size_t k, Vec2 pole,
                         double r_disk) {
  // The relevant image is within one lattice step of the segment box.
  PoleHit best{k, 0.0, 0.0, 0.0, 1e9};
  const Vec2 rel0 = torus_delta(p, pole);
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      const Vec2 img = {p.x + rel0.x + dx, p.y + rel0.y + dy};
      const Vec2 rel = img - p;
      double t = (rel.x * delta.x + rel.y * delta.y) / (len * len);
      t = std::min(1.0, std::max(0.0, t));
      const Vec2 q = {p.x + t * delta.x, p.y + t * delta.y};
      const double d = std::hypot(q.x - img.x, q.y - img.y);
      if (d < best.dist) {
        best.dist = d;
        best.t_center = t;
        if (d < r_disk) {
          const double span = std::sqrt(std::max(0.0, r_disk * r_disk - d * d)) / len;
          best.t_in = std::max(0.0, t - span);
          best.t_out = std::min(1.0, t + span);
        }
      }
    }
  }
  return best;
}

}  // namespace

double segment_length(Vec2 p, Vec2 q, const ConformalMetric& m, double rel_tol) {
  const Vec2 delta = torus_delta(p, q);
  const double len = norm(delta);
  if (len == 0.0) return 0.0;
  const double r_disk = m.pole_disk_radius();

  auto point_at = [&](double t) {
    return wrap01(Vec2{p.x + t * delta.x, p.y + t * delta.y});
  };
  auto integrand = [&](double t) { return std::exp(0.5 * m.log_factor(point_at(t))); };

  // Locate pole encounters.
  std::vector<PoleHit> hits;
  for (std::size_t k = 0; k < m.poles().size(); ++k) {
    PoleHit h = closest_approach(p, delta, len, k, m.poles()[k].pos, r_disk);
    if (h.dist < r_disk) hits.push_back(h);
  }

  const double kPoleEps = 1e-12;
  for (const auto& h : hits) {
    if (h.dist < kPoleEps && h.t_center * len > kPoleEps &&
        (1.0 - h.t_center) * len > kPoleEps)
      throw std::runtime_error(
          "curve_length: segment passes through an interior pole; split the path "
          "at the pole");
  }

  double total = 0.0;
  // Endpoint-at-pole pieces switch to the analytic local model; build the
  // list of plain sub-intervals left over.
  std::vector<std::pair<double, double>> plain{{0.0, 1.0}};
  for (const auto& h : hits) {
    const bool at_start = h.dist < kPoleEps && h.t_center * len <= kPoleEps;
    const bool at_end = h.dist < kPoleEps && (1.0 - h.t_center) * len <= kPoleEps;
    if (!at_start && !at_end) continue;
    const MetricPole& pole = m.poles()[h.pole];
    const double t0 = at_start ? 0.0 : h.t_in;
    const double t1 = at_start ? h.t_out : 1.0;
    const double piece_len = (t1 - t0) * len;
    // Arc-length parametrization from the pole outward.
    const Vec2 dir = at_start ? Vec2{delta.x / len, delta.y / len}
                              : Vec2{-delta.x / len, -delta.y / len};
    const Vec2 origin = at_start ? p : wrap01(Vec2{p.x + delta.x, p.y + delta.y});
    auto f = [&](double s) {
      const Vec2 z = wrap01(Vec2{origin.x + s * dir.x, origin.y + s * dir.y});
      return std::pow(s, 0.5 * pole.exponent) *
             std::exp(0.5 * m.log_factor_regular(h.pole, z));
    };
    if (0.5 * pole.exponent <= -1.0)
      throw std::runtime_error("curve_length: non-rectifiable pole (exponent <= -2)");
    total += integrate_endpoint_power(f, piece_len, 0.5 * pole.exponent, rel_tol);
    // Trim the plain interval.
    auto& iv = plain[0];
    if (at_start)
      iv.first = std::max(iv.first, t1);
    else
      iv.second = std::min(iv.second, t0);
  }

  for (const auto& iv : plain) {
    if (iv.second - iv.first <= 0.0) continue;
    total += len * integrate_adaptive([&](double t) { return integrand(t); }, iv.first,
                                      iv.second, rel_tol);
  }
  return total;
}

double segment_length_split(Vec2 p, Vec2 q, const ConformalMetric& m, double rel_tol) {
  const Vec2 delta = torus_delta(p, q);
  const double len = norm(delta);
  if (len == 0.0) return 0.0;
  // Interior pole hits, sorted along the segment.
  std::vector<double> cuts;
  for (std::size_t k = 0; k < m.poles().size(); ++k) {
    const PoleHit h = closest_approach(p, delta, len, k, m.poles()[k].pos,
                                       m.pole_disk_radius());
    if (h.dist < 1e-12 && h.t_center * len > 1e-12 && (1.0 - h.t_center) * len > 1e-12)
      cuts.push_back(h.t_center);
  }
  if (cuts.empty()) return segment_length(p, q, m, rel_tol);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  double t0 = 0.0;
  for (double t : cuts) {
    total += segment_length(wrap01({p.x + t0 * delta.x, p.y + t0 * delta.y}),
                            wrap01({p.x + t * delta.x, p.y + t * delta.y}), m, rel_tol);
    t0 = t;
  }
  total += segment_length(wrap01({p.x + t0 * delta.x, p.y + t0 * delta.y}),
                          wrap01({p.x + delta.x, p.y + delta.y}), m, rel_tol);
  return total;
}

double curve_length(const Polyline& gamma, const ConformalMetric& m, double rel_tol) {
  double total = 0.0;
  const auto& pts = gamma.points();
  for (std::size_t s = 0; s + 1 < pts.size(); ++s)
    total += segment_length(pts[s], pts[s + 1], m, rel_tol);
  return total;
}

}  // namespace krf
