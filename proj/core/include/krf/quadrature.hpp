#pragma once

#include <functional>
#include <vector>

namespace krf {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Rule of given order (cached; computed once by Newton on Legendre P_n).
const GaussRule& gauss_rule(int npts);

/// Integrate f over [a, b] with an npts-point Gauss rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int npts);

/// Adaptive Gauss quadrature: bisect until the GL(n) vs GL(2n) estimate of a
/// panel changes by less than tol relative to the running total.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, int max_depth = 40);

/// Integrate f over (0, b] where f ~ s^p * (smooth) with p > -1 at s = 0:
/// geometric panels toward the endpoint plus the analytic leading-order tail
/// below the innermost panel, using f(s_ref) / s_ref^p as the local factor.
double integrate_endpoint_power(const std::function<double(double)>& f, double b,
                                double p, double rel_tol);

}  // namespace krf
