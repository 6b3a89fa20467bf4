#include "krf/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace krf {

namespace {

GaussRule compute_rule(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int npts) {
  static std::map<int, GaussRule> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(npts);
  if (it == cache.end()) it = cache.emplace(npts, compute_rule(npts)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int npts) {
  const GaussRule& r = gauss_rule(npts);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < npts; ++i) s += r.w[i] * f(mid + half * r.x[i]);
  return s * half;
}

namespace {
double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double tol_abs, int depth, int max_depth) {
  const double coarse = integrate_gl(f, a, b, 8);
  const double m = 0.5 * (a + b);
  const double fine = integrate_gl(f, a, m, 8) + integrate_gl(f, m, b, 8);
  if (std::fabs(fine - coarse) <= tol_abs || depth >= max_depth) return fine;
  return adaptive_rec(f, a, m, 0.5 * tol_abs, depth + 1, max_depth) +
         adaptive_rec(f, m, b, 0.5 * tol_abs, depth + 1, max_depth);
}
}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, int max_depth) {
  const double rough = std::fabs(integrate_gl(f, a, b, 8)) + 1e-300;
  return adaptive_rec(f, a, b, rel_tol * rough, 0, max_depth);
}

double integrate_endpoint_power(const std::function<double(double)>& f, double b,
                                double p, double rel_tol) {
  if (p <= -1.0)
    throw std::invalid_argument("integrate_endpoint_power: exponent not integrable");
  if (b <= 0.0) return 0.0;
  double total = 0.0;
  double hi = b;
  // Geometric panels; each panel sees a smooth integrand.
  const int max_panels = 48;
  for (int m = 0; m < max_panels; ++m) {
    const double lo = 0.5 * hi;
    total += integrate_gl(f, lo, hi, 12);
    hi = lo;
    if (m > 4) {
      // Remaining mass estimate from the power law: stop when negligible.
      const double s_ref = 1.5 * hi;
      const double c = f(s_ref) / std::pow(s_ref, p);
      const double tail = c * std::pow(hi, p + 1.0) / (p + 1.0);
      if (std::fabs(tail) <= rel_tol * std::fabs(total)) {
        return total + tail;
      }
    }
  }
  const double s_ref = 1.5 * hi;
  const double c = f(s_ref) / std::pow(s_ref, p);
  return total + c * std::pow(hi, p + 1.0) / (p + 1.0);
}

}  // namespace krf
