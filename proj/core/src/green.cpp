#include "krf/green.hpp"

#include <cmath>
#include <limits>

#include "krf/quadrature.hpp"

namespace krf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// C^6 monotone step: 0 at t<=0, 1 at t>=1; s'(t) = 12012 t^6 (1-t)^6.
double step_c6(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t7 = std::pow(t, 7);
  return t7 * (1716.0 +
               t * (-9009.0 +
                    t * (20020.0 + t * (-24024.0 + t * (16380.0 + t * (-6006.0 + t * 924.0))))));
}
double step_c6_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = t * (1.0 - t);
  const double a3 = a * a * a;
  return 12012.0 * a3 * a3;
}
double step_c6_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = t * (1.0 - t);
  const double a2 = a * a;
  return 12012.0 * 6.0 * a2 * a2 * a * (1.0 - 2.0 * t);
}

struct Cutoff {
  double r_in, r_out, w;
  double eta(double r) const { return 1.0 - step_c6((r - r_in) / w); }
  double eta_d1(double r) const { return -step_c6_d1((r - r_in) / w) / w; }
  double eta_d2(double r) const { return -step_c6_d2((r - r_in) / w) / (w * w); }
};

}  // namespace

GreenFunction::GreenFunction(TorusGrid grid, Vec2 a, Spectral& spectral)
    : grid_(grid), a_(wrap01(a)), correction_(grid) {
  const Cutoff cut{cutoff_inner_radius(), cutoff_outer_radius(),
                   cutoff_outer_radius() - cutoff_inner_radius()};

  // lap(eta(r) log r) = delta_a + s with s supported on the cutoff annulus.
  ScalarField rhs(grid_);
  const int n = grid_.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double r = flat_distance(a_, grid_.point(i, j));
      double s = 0.0;
      if (r > cut.r_in && r < cut.r_out) {
        const double lr = std::log(r);
        s = (cut.eta_d2(r) * lr + cut.eta_d1(r) * (2.0 + lr) / r) / kTwoPi;
      }
      rhs.at(i, j) = -1.0 - s;
    }
  }
  // The continuum rhs has exact mean zero; the sampled one misses by
  // quadrature round-off only. Project before the solve.
  rhs.make_mean_zero();
  correction_ = spectral.solve_poisson(rhs);

  // Shift R so the full G integrates to zero: the log part has the exact
  // radial integral 2*pi * int_0^r_out eta(rho) log(rho) rho d rho.
  const double i_log =
      kTwoPi * integrate_endpoint_power(
                   [&](double rho) { return cut.eta(rho) * std::log(rho) * rho; },
                   cut.r_out, 0.5, 1e-14);
  correction_ += -i_log;
}

double GreenFunction::eval(Vec2 z) const {
  const double r = flat_distance(a_, z);
  if (r == 0.0) return -std::numeric_limits<double>::infinity();
  double v = correction_.interp_bicubic(z);
  if (r < cutoff_outer_radius()) {
    const Cutoff cut{cutoff_inner_radius(), cutoff_outer_radius(),
                     cutoff_outer_radius() - cutoff_inner_radius()};
    v += cut.eta(r) * std::log(r);
  }
  return v;
}

double GreenFunction::eval_minus_log(Vec2 z) const {
  const double r = flat_distance(a_, z);
  double v = correction_.interp_bicubic(z);
  if (r == 0.0) return v;
  if (r < cutoff_outer_radius()) {
    const Cutoff cut{cutoff_inner_radius(), cutoff_outer_radius(),
                     cutoff_outer_radius() - cutoff_inner_radius()};
    v += (cut.eta(r) - 1.0) * std::log(r);
  } else {
    v -= std::log(r);
  }
  return v;
}

double GreenFunction::correction_at_pole() const {
  return correction_.interp_bicubic(a_);
}

double GreenFunction::integral() const {
  // Partition of unity: grid quadrature away from the pole, polar inside.
  const double rho0 = 0.125;
  const Cutoff chi{0.0625, 0.125, 0.0625};
  const int n = grid_.n();
  long double s = 0.0L;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double r = flat_distance(a_, grid_.point(i, j));
      const double w = 1.0 - chi.eta(r);
      if (w == 0.0) continue;
      s += w * eval(grid_.point(i, j));
    }
  }
  double total = static_cast<double>(s) * grid_.h() * grid_.h();

  const int m = 128;
  auto radial = [&](double rho) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      const double th = kTwoPi * k / m;
      acc += eval(wrap01(Vec2{a_.x + rho * std::cos(th), a_.y + rho * std::sin(th)}));
    }
    return chi.eta(rho) * rho * acc / m;
  };
  total += kTwoPi * integrate_endpoint_power(radial, rho0, 0.5, 1e-12);
  return total;
}

double GreenFunction::circle_mean(double r, int m) const {
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = kTwoPi * k / m;
    acc += eval(wrap01(Vec2{a_.x + r * std::cos(th), a_.y + r * std::sin(th)}));
  }
  return acc / m;
}

}  // namespace krf
