#include "krf/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace krf {

double ScalarField::mean() const {
  // Pairwise-ish summation via long double accumulator; fields are <= 2^24
  // entries so this stays well below 1e-15 relative error.
  long double s = 0.0L;
  for (double x : v_) s += x;
  return static_cast<double>(s / static_cast<long double>(v_.size()));
}

double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::fabs(x));
  return m;
}

double ScalarField::integral() const {
  long double s = 0.0L;
  for (double x : v_) s += x;
  return static_cast<double>(s) * grid_.h() * grid_.h();
}

void ScalarField::make_mean_zero() {
  double m = mean();
  for (double& x : v_) x -= m;
  mean_zero_ = true;
}

void ScalarField::set_mean_zero_flag(bool flag) {
  if (flag) {
    double m = mean();
    if (std::fabs(m) > 1e-12)
      throw std::runtime_error("ScalarField: mean-zero certification failed, |mean| = " +
                               std::to_string(m));
  }
  mean_zero_ = flag;
}

double ScalarField::interp_bilinear(Vec2 p) const {
  const int n = grid_.n();
  const double gx = wrap01(p.x) * n;
  const double gy = wrap01(p.y) * n;
  const int i0 = static_cast<int>(std::floor(gx));
  const int j0 = static_cast<int>(std::floor(gy));
  const double fx = gx - i0;
  const double fy = gy - j0;
  const double v00 = at(i0, j0), v10 = at(i0 + 1, j0);
  const double v01 = at(i0, j0 + 1), v11 = at(i0 + 1, j0 + 1);
  return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

namespace {
inline double catmull_rom(double pm1, double p0, double p1, double p2, double t) {
  return p0 + 0.5 * t * (p1 - pm1 +
                         t * (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2 +
                              t * (3.0 * (p0 - p1) + p2 - pm1)));
}
}  // namespace

double ScalarField::interp_bicubic(Vec2 p) const {
  const int n = grid_.n();
  const double gx = wrap01(p.x) * n;
  const double gy = wrap01(p.y) * n;
  const int i0 = static_cast<int>(std::floor(gx));
  const int j0 = static_cast<int>(std::floor(gy));
  const double fx = gx - i0;
  const double fy = gy - j0;
  double col[4];
  for (int dj = -1; dj <= 2; ++dj) {
    col[dj + 1] = catmull_rom(at(i0 - 1, j0 + dj), at(i0, j0 + dj),
                              at(i0 + 1, j0 + dj), at(i0 + 2, j0 + dj), fx);
  }
  return catmull_rom(col[0], col[1], col[2], col[3], fy);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  ScalarField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  ScalarField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] *= s;
  return r;
}

ScalarField& operator+=(ScalarField& a, const ScalarField& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

ScalarField& operator+=(ScalarField& a, double c) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += c;
  return a;
}

}  // namespace krf
