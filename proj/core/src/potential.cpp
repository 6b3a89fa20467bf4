#include "krf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "krf/quadrature.hpp"

namespace krf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInf = std::numeric_limits<double>::infinity();

double step_c6(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t7 = std::pow(t, 7);
  return t7 * (1716.0 +
               t * (-9009.0 +
                    t * (20020.0 + t * (-24024.0 + t * (16380.0 + t * (-6006.0 + t * 924.0))))));
}

// Smooth radial weight: 1 inside r_d/2, 0 outside r_d.
double disk_weight(double r, double r_d) {
  return 1.0 - step_c6((r - 0.5 * r_d) / (0.5 * r_d));
}
}  // namespace

void validate_poles(const std::vector<PoleSpec>& poles, const TorusGrid& grid) {
  const double min_sep = 8.0 * grid.h();
  for (const auto& p : poles) {
    if (!(p.nu > 0.0))
      throw std::runtime_error("pole validation: Lelong number must be positive");
    if (p.sign == Sign::minus && p.nu >= 2.0)
      throw std::runtime_error("cusp: density not integrable (minus pole with nu = " +
                               std::to_string(p.nu) + " >= 2)");
  }
  for (std::size_t i = 0; i < poles.size(); ++i) {
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      const double d = flat_distance(poles[i].pos, poles[j].pos);
      if (d < min_sep * (1.0 - 1e-12))
        throw std::runtime_error(
            "pole validation: separation " + std::to_string(d) +
            " below 8h = " + std::to_string(min_sep) + " at the working resolution");
    }
  }
}

SingularPotential::SingularPotential(TorusGrid grid) : grid_(grid) {}

SingularPotential::SingularPotential(TorusGrid grid, std::vector<PoleSpec> poles,
                                     Spectral& spectral)
    : grid_(grid), poles_(std::move(poles)) {
  for (std::size_t i = 1; i < poles_.size(); ++i)
    if (poles_[i].sign != poles_[0].sign)
      throw std::runtime_error("SingularPotential holds poles of one sign only");
  greens_.reserve(poles_.size());
  for (const auto& p : poles_)
    greens_.push_back(std::make_shared<GreenFunction>(grid_, p.pos, spectral));
}

SingularPotential::SingularPotential(TorusGrid grid, std::vector<PoleSpec> poles,
                                     Spectral& spectral, ScalarField smooth_residual)
    : SingularPotential(grid, std::move(poles), spectral) {
  smooth_ = std::move(smooth_residual);
}

double SingularPotential::qpsh_constant() const {
  double a = 0.0;
  for (const auto& p : poles_) a += p.nu;
  return a;
}

double SingularPotential::max_nu() const {
  double m = 0.0;
  for (const auto& p : poles_) m = std::max(m, p.nu);
  return m;
}

double SingularPotential::eval(Vec2 z) const {
  double v = 0.0;
  for (std::size_t k = 0; k < poles_.size(); ++k) {
    if (flat_distance(poles_[k].pos, z) == 0.0) return -kInf;
    v += poles_[k].nu * greens_[k]->eval(z);
  }
  if (smooth_) v += smooth_->interp_bicubic(z);
  return v;
}

double SingularPotential::eval_regular_at(std::size_t k, Vec2 z) const {
  double v = poles_[k].nu * greens_[k]->eval_minus_log(z);
  for (std::size_t j = 0; j < poles_.size(); ++j) {
    if (j == k) continue;
    v += poles_[j].nu * greens_[j]->eval(z);
  }
  if (smooth_) v += smooth_->interp_bicubic(z);
  return v;
}

double soft_max(double a, double b, double stiffness) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(-stiffness * (hi - lo))) / stiffness;
}

ScalarField SingularPotential::truncate(int level) const {
  if (level <= 0) throw std::invalid_argument("truncate: level must be positive");
  ScalarField out(grid_);
  const int n = grid_.n();
  const double floor = -static_cast<double>(level);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out.at(i, j) = soft_max(eval(grid_.point(i, j)), floor);
  return out;
}

LelongFit lelong_estimate(const SingularPotential& psi, Vec2 probe) {
  const double h = psi.grid().h();
  const double radii[4] = {4 * h, 8 * h, 16 * h, 32 * h};
  const int m = 64;

  double xs[4], ys[4];
  for (int k = 0; k < 4; ++k) {
    double acc = 0.0;
    for (int q = 0; q < m; ++q) {
      const double th = kTwoPi * q / m;
      const Vec2 z = wrap01(
          Vec2{probe.x + radii[k] * std::cos(th), probe.y + radii[k] * std::sin(th)});
      for (const auto& p : psi.poles()) {
        if (flat_distance(p.pos, probe) == 0.0) continue;  // the probe's own pole
        if (flat_distance(p.pos, z) < 4 * h)
          throw std::runtime_error("poles too close to estimate");
      }
      acc += psi.eval(z);
    }
    xs[k] = std::log(radii[k]);
    ys[k] = acc / m;
  }

  double mx = 0, my = 0;
  for (int k = 0; k < 4; ++k) {
    mx += xs[k] / 4;
    my += ys[k] / 4;
  }
  double sxx = 0, sxy = 0;
  for (int k = 0; k < 4; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  LelongFit fit;
  fit.nu_hat = sxy / sxx;
  double rss = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double pred = my + fit.nu_hat * (xs[k] - mx);
    rss += (ys[k] - pred) * (ys[k] - pred);
  }
  fit.fit_residual = std::sqrt(rss / 4.0);
  return fit;
}

namespace {

struct DensityPole {
  Vec2 pos;
  double exponent;   // density ~ r^exponent near the pole
  bool from_plus;
  std::size_t idx;   // index within its potential
  double disk_radius;
};

std::vector<DensityPole> density_poles(const SingularPotential& plus,
                                       const SingularPotential& minus) {
  std::vector<DensityPole> out;
  for (std::size_t k = 0; k < plus.pole_count(); ++k)
    out.push_back({plus.poles()[k].pos, +plus.poles()[k].nu, true, k, 0.0});
  for (std::size_t k = 0; k < minus.pole_count(); ++k)
    out.push_back({minus.poles()[k].pos, -minus.poles()[k].nu, false, k, 0.0});

  const double h = plus.grid().h();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sep = kInf;
    for (std::size_t j = 0; j < out.size(); ++j)
      if (j != i) sep = std::min(sep, flat_distance(out[i].pos, out[j].pos));
    double r = std::max(4.0 * h, 1.0 / 32.0);
    r = std::min(r, 0.45 * sep);
    r = std::min(r, GreenFunction::cutoff_inner_radius());
    out[i].disk_radius = r;
  }
  return out;
}

double density_log_regular(const SingularPotential& plus, const SingularPotential& minus,
                           const DensityPole& p, Vec2 z) {
  if (p.from_plus) return plus.eval_regular_at(p.idx, z) - minus.eval(z);
  return plus.eval(z) - minus.eval_regular_at(p.idx, z);
}

}  // namespace

double normalization_constant(const SingularPotential& plus,
                              const SingularPotential& minus) {
  if (minus.max_nu() >= 2.0)
    throw std::runtime_error("cusp: density not integrable");
  const TorusGrid& grid = plus.grid();
  if (!(grid == minus.grid()))
    throw std::invalid_argument("normalization_constant: grid mismatch");

  const auto dpoles = density_poles(plus, minus);
  const int n = grid.n();

  // Grid quadrature outside the pole disks, weighted by the smooth partition.
  long double acc = 0.0L;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 z = grid.point(i, j);
      double w = 1.0;
      for (const auto& p : dpoles) {
        const double r = flat_distance(p.pos, z);
        if (r < p.disk_radius) w -= disk_weight(r, p.disk_radius);
      }
      if (w <= 0.0) continue;
      acc += w * std::exp(plus.eval(z) - minus.eval(z));
    }
  }
  double total = static_cast<double>(acc) * grid.h() * grid.h();

  // Polar quadrature of density * disk weight around each pole.
  const int m = 64;
  for (const auto& p : dpoles) {
    auto radial = [&](double rho) {
      double ang = 0.0;
      for (int q = 0; q < m; ++q) {
        const double th = kTwoPi * q / m;
        const Vec2 z =
            wrap01(Vec2{p.pos.x + rho * std::cos(th), p.pos.y + rho * std::sin(th)});
        ang += std::exp(density_log_regular(plus, minus, p, z));
      }
      return disk_weight(rho, p.disk_radius) * std::pow(rho, p.exponent + 1.0) * ang / m;
    };
    total += kTwoPi * integrate_endpoint_power(radial, p.disk_radius, p.exponent + 1.0, 1e-11);
  }

  return -std::log(total);
}

double normalization_constant(const ScalarField& plus_trunc,
                              const ScalarField& minus_trunc) {
  if (!(plus_trunc.grid() == minus_trunc.grid()))
    throw std::invalid_argument("normalization_constant: grid mismatch");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < plus_trunc.size(); ++i)
    acc += std::exp(plus_trunc[i] - minus_trunc[i]);
  return -std::log(static_cast<double>(acc / static_cast<long double>(plus_trunc.size())));
}

std::vector<double> pole_mass_partial_sums(const SingularPotential& minus,
                                           std::size_t k, int max_panels) {
  const PoleSpec& pole = minus.poles().at(k);
  const double r0 = std::max(4.0 * minus.grid().h(), 1.0 / 32.0);
  const int m = 32;
  auto radial = [&](double rho) {
    double ang = 0.0;
    for (int q = 0; q < m; ++q) {
      const double th = kTwoPi * q / m;
      const Vec2 z =
          wrap01(Vec2{pole.pos.x + rho * std::cos(th), pole.pos.y + rho * std::sin(th)});
      ang += std::exp(-minus.eval_regular_at(k, z));
    }
    return std::pow(rho, 1.0 - pole.nu) * ang / m;
  };
  std::vector<double> sums;
  double total = 0.0;
  double hi = r0;
  for (int p = 0; p < max_panels; ++p) {
    total += kTwoPi * integrate_gl(radial, 0.5 * hi, hi, 12);
    hi *= 0.5;
    sums.push_back(total);
  }
  return sums;
}

}  // namespace krf
