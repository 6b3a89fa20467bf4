#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace krf {

/// A point of the fundamental domain [0,1)^2 of the unit square torus.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Reduce a coordinate to [0,1).
inline double wrap01(double t) {
  double r = t - std::floor(t);
  return (r >= 1.0) ? 0.0 : r;
}

/// Reduce to the symmetric interval [-1/2, 1/2).
inline double wrap_sym(double t) {
  double r = t - std::round(t);
  return (r >= 0.5) ? -0.5 : r;
}

inline Vec2 wrap01(Vec2 p) { return {wrap01(p.x), wrap01(p.y)}; }

/// Minimal-image displacement from a to b on the torus.
inline Vec2 torus_delta(Vec2 a, Vec2 b) {
  return {wrap_sym(b.x - a.x), wrap_sym(b.y - a.y)};
}

/// Flat geodesic distance on the unit torus (area 1, diameter sqrt(2)/2).
inline double flat_distance(Vec2 a, Vec2 b) { return norm(torus_delta(a, b)); }

/// Periodic n-by-n discretization of the unit square fundamental domain.
///
/// n is a power of two, n >= 64. Node (i,j) sits at (i*h, j*h) and owns a
/// cell of area h^2, so the flat area form has total mass exactly 1.
class TorusGrid {
public:
  TorusGrid() = default;
  explicit TorusGrid(int n) : n_(n), h_(1.0 / n) {
    if (n < 64 || (n & (n - 1)) != 0)
      throw std::invalid_argument("TorusGrid: n must be a power of two >= 64, got " +
                                  std::to_string(n));
  }

  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  int wrap(int i) const {
    int r = i % n_;
    return r < 0 ? r + n_ : r;
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(wrap(j)) * n_ + wrap(i);
  }
  Vec2 point(int i, int j) const { return {wrap(i) * h_, wrap(j) * h_}; }
  Vec2 point(std::size_t idx) const {
    return {(idx % n_) * h_, (idx / n_) * h_};
  }

  bool operator==(const TorusGrid& o) const { return n_ == o.n_; }

private:
  int n_ = 0;
  double h_ = 0.0;
};

/// Real scalar samples on a TorusGrid, row-major with x fastest.
///
/// Values are finite at every node; singular data are carried by
/// SingularPotential and only ever sampled after truncation.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(TorusGrid g, double fill = 0.0)
      : grid_(g), v_(g.size(), fill) {}
  ScalarField(TorusGrid g, std::vector<double> values)
      : grid_(g), v_(std::move(values)) {
    if (v_.size() != grid_.size())
      throw std::invalid_argument("ScalarField: value count does not match grid");
  }

  const TorusGrid& grid() const { return grid_; }
  int n() const { return grid_.n(); }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& at(int i, int j) { return v_[grid_.index(i, j)]; }
  double at(int i, int j) const { return v_[grid_.index(i, j)]; }

  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  double mean() const;
  double min() const;
  double max() const;
  double max_abs() const;
  /// Grid quadrature: h^2 * sum of f(values).
  double integral() const;

  /// Subtract the mean and set the certified mean-zero flag.
  void make_mean_zero();
  bool mean_zero_flag() const { return mean_zero_; }
  /// Certify the flag: throws if |mean| > 1e-12 when setting.
  void set_mean_zero_flag(bool flag);

  /// Periodic bilinear interpolation at an arbitrary point.
  double interp_bilinear(Vec2 p) const;
  /// Periodic bicubic (Catmull-Rom) interpolation; C^1, O(h^3..h^4) accurate.
  double interp_bicubic(Vec2 p) const;

private:
  TorusGrid grid_;
  std::vector<double> v_;
  bool mean_zero_ = false;
};

/// Node-wise combination helpers.
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField& operator+=(ScalarField& a, const ScalarField& b);
ScalarField& operator+=(ScalarField& a, double c);

}  // namespace krf
