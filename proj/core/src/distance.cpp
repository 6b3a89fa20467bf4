#include "krf/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace krf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Heap entry ordered by (distance, index): deterministic tie-breaking.
struct HeapEntry {
  double d;
  std::uint32_t idx;
  bool operator>(const HeapEntry& o) const {
    return d > o.d || (d == o.d && idx > o.idx);
  }
};
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

// Nodal speeds e^{u/2}; infinities allowed at minus poles sitting on nodes.
std::vector<double> nodal_length_element(const ConformalMetric& m) {
  const int n = m.grid().n();
  std::vector<double> w(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      w[m.grid().index(i, j)] = std::exp(0.5 * m.log_factor(m.grid().point(i, j)));
  return w;
}

// Two-point Tsitsiklis update: min over s in [0,1] of
//   (1-s) dA + s dB + W |(1-s) va + s vb|.
// va, vb are the offsets (in torus units) to the two known neighbors.
double triangle_update(double dA, double dB, Vec2 va, Vec2 vb, double W) {
  const Vec2 e = vb - va;
  // g(s) = (1-s) dA + s dB + W * |va + s e|; g' is monotone, bisect on it.
  auto gp = [&](double s) {
    const Vec2 v{va.x + s * e.x, va.y + s * e.y};
    const double nv = std::max(norm(v), 1e-300);
    return (dB - dA) + W * dot(v, e) / nv;
  };
  double lo = 0.0, hi = 1.0;
  const double glo = gp(0.0), ghi = gp(1.0);
  double s;
  if (glo >= 0.0)
    s = 0.0;
  else if (ghi <= 0.0)
    s = 1.0;
  else {
    for (int it = 0; it < 60; ++it) {
      s = 0.5 * (lo + hi);
      (gp(s) > 0.0 ? hi : lo) = s;
    }
    s = 0.5 * (lo + hi);
  }
  const Vec2 v{va.x + s * e.x, va.y + s * e.y};
  return (1.0 - s) * dA + s * dB + W * norm(v);
}

}  // namespace

DistanceField eikonal_distance(const ConformalMetric& m, Vec2 source) {
  const TorusGrid& grid = m.grid();
  const int n = grid.n();
  const std::size_t N = grid.size();
  const double h = grid.h();
  source = wrap01(source);

  const std::vector<double> W = nodal_length_element(m);
  const double r_disk = m.pole_disk_radius();

  // Virtual vertices: one per metric pole, connected radially to the nodes
  // of its disk by the analytic local model. The membership disk is wider
  // than the quadrature disk so the upwind scheme never differentiates
  // across the steep pole region.
  const std::size_t P = m.poles().size();
  double sep = 1.0;
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t j = i + 1; j < P; ++j)
      sep = std::min(sep, flat_distance(m.poles()[i].pos, m.poles()[j].pos));
  const double r_member =
      std::min({std::max(r_disk, 0.015), 0.45 * sep, GreenFunction::cutoff_inner_radius()});
  std::vector<std::vector<std::pair<std::size_t, double>>> membership(P);
  std::vector<std::int32_t> in_disk(N, -1);
  for (std::size_t k = 0; k < P; ++k) {
    const Vec2 a = m.poles()[k].pos;
    const int rad = static_cast<int>(std::ceil(r_member / h)) + 1;
    const int ci = static_cast<int>(std::round(a.x / h));
    const int cj = static_cast<int>(std::round(a.y / h));
    for (int dj = -rad; dj <= rad; ++dj) {
      for (int di = -rad; di <= rad; ++di) {
        const std::size_t idx = grid.index(ci + di, cj + dj);
        const Vec2 z = grid.point(ci + di, cj + dj);
        const double r = flat_distance(a, z);
        if (r >= r_member) continue;
        in_disk[idx] = static_cast<std::int32_t>(k);
        if (r == 0.0) continue;
        const double wgt = segment_length_split(a, z, m, 1e-9);
        membership[k].push_back({idx, wgt});
      }
    }
  }

  std::vector<double> dist(N + P, kInf);
  std::vector<char> known(N + P, 0);
  MinHeap heap;

  auto push = [&](std::size_t idx, double d) {
    if (d < dist[idx]) {
      dist[idx] = d;
      heap.push({d, static_cast<std::uint32_t>(idx)});
    }
  };

  // Seed: exact curve lengths within a small disk of the source (and the
  // source's own pole vertex if it sits inside a pole disk).
  {
    const double r_seed = 3.0 * h;
    const int ci = static_cast<int>(std::round(source.x / h));
    const int cj = static_cast<int>(std::round(source.y / h));
    for (int dj = -4; dj <= 4; ++dj) {
      for (int di = -4; di <= 4; ++di) {
        const Vec2 z = grid.point(ci + di, cj + dj);
        const double r = flat_distance(source, z);
        if (r > r_seed) continue;
        push(grid.index(ci + di, cj + dj), segment_length_split(source, z, m, 1e-9));
      }
    }
    for (std::size_t k = 0; k < P; ++k) {
      const double r = flat_distance(m.poles()[k].pos, source);
      if (r == 0.0)
        push(N + k, 0.0);
      else if (r < r_member)
        push(N + k, segment_length_split(source, m.poles()[k].pos, m, 1e-9));
    }
  }

  // 8 neighbor offsets in index space and torus units.
  const int oi[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  const int oj[8] = {0, 1, 1, 1, 0, -1, -1, -1};

  // Static update mode per node: anything touching a pole disk relaxes by
  // exact edge quadrature. The mode must not depend on which neighbors are
  // currently known, or late mode switches would lower candidates below
  // already-popped keys.
  std::vector<char> near_pole_flag(N, 0);
  if (P > 0) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        bool flag = in_disk[grid.index(i, j)] >= 0;
        for (int t = 0; t < 8 && !flag; ++t)
          flag = in_disk[grid.index(i + oi[t], j + oj[t])] >= 0;
        near_pole_flag[grid.index(i, j)] = flag ? 1 : 0;
      }
  }

  auto update_node = [&](int i, int j) {
    const std::size_t x = grid.index(i, j);
    if (known[x]) return;
    const double Wx = W[x];
    if (!std::isfinite(Wx)) return;  // reached through its pole vertex only
    double best = dist[x];
    double dn[8];
    for (int t = 0; t < 8; ++t) {
      const std::size_t nb = grid.index(i + oi[t], j + oj[t]);
      dn[t] = known[nb] ? dist[nb] : kInf;
    }
    if (near_pole_flag[x]) {
      // Plane-wave updates are invalid across the steep pole profile; fall
      // back to exact straight-edge quadrature (graph relaxation).
      const Vec2 z = grid.point(i, j);
      for (int t = 0; t < 8; ++t) {
        if (!std::isfinite(dn[t])) continue;
        const Vec2 znb = grid.point(i + oi[t], j + oj[t]);
        const double cand = dn[t] + segment_length_split(znb, z, m, 1e-9);
        if (cand < best) best = cand;
      }
    } else {
      for (int t = 0; t < 8; ++t) {
        const int t2 = (t + 1) & 7;
        const Vec2 va{oi[t] * h, oj[t] * h};
        const Vec2 vb{oi[t2] * h, oj[t2] * h};
        const bool ka = std::isfinite(dn[t]), kb = std::isfinite(dn[t2]);
        double cand = kInf;
        if (ka && kb)
          cand = triangle_update(dn[t], dn[t2], va, vb, Wx);
        else if (ka)
          cand = dn[t] + Wx * norm(va);
        else if (kb)
          cand = dn[t2] + Wx * norm(vb);
        if (cand < best) best = cand;
      }
    }
    if (best < dist[x]) push(x, best);
  };

  double last_popped = -kInf;
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    if (known[top.idx] || top.d > dist[top.idx]) continue;
    if (top.d < last_popped - 1e-12)
      throw std::runtime_error(
          "eikonal_distance: non-monotone heap update (corrupted metric values)");
    last_popped = top.d;
    known[top.idx] = 1;

    if (top.idx >= N) {
      // Pole vertex: relax its whole disk radially.
      const std::size_t k = top.idx - N;
      for (const auto& [node, wgt] : membership[k])
        if (!known[node]) push(node, dist[top.idx] + wgt);
      continue;
    }

    const int i = static_cast<int>(top.idx % n);
    const int j = static_cast<int>(top.idx / n);
    for (int t = 0; t < 8; ++t) update_node(i + oi[t], j + oj[t]);
    // Feed pole vertices from settled disk nodes.
    for (std::size_t k = 0; k < P; ++k) {
      if (known[N + k]) continue;
      const double r = flat_distance(m.poles()[k].pos, grid.point(i, j));
      if (r < r_member) {
        for (const auto& [node, wgt] : membership[k]) {
          if (node == top.idx) {
            push(N + k, dist[top.idx] + wgt);
            break;
          }
        }
      }
    }
  }

  DistanceField out;
  out.source = source;
  out.values = ScalarField(grid);
  for (std::size_t x = 0; x < N; ++x)
    out.values[x] = std::isfinite(dist[x]) ? dist[x] : 0.0;
  out.method = "eikonal";
  out.metric_tag = m.tag();
  return out;
}

DistanceField lattice_distance(const ConformalMetric& m, Vec2 source) {
  const TorusGrid& grid = m.grid();
  const int n = grid.n();
  const std::size_t N = grid.size();
  const double h = grid.h();

  // Snap the source to the nearest node: the lattice oracle is a graph
  // metric on nodes.
  const int si = static_cast<int>(std::round(wrap01(source).x / h)) % n;
  const int sj = static_cast<int>(std::round(wrap01(source).y / h)) % n;
  const Vec2 src_node = grid.point(si, sj);

  // King + knight moves; each undirected edge appears once per direction set.
  const int oi[16] = {1, 1, 0, -1, -1, -1, 0, 1, 2, 1, -1, -2, -2, -1, 1, 2};
  const int oj[16] = {0, 1, 1, 1, 0, -1, -1, -1, 1, 2, 2, 1, -1, -2, -2, -1};

  const double r_disk = m.pole_disk_radius();
  const bool has_poles = !m.poles().empty();

  auto edge_weight = [&](int i, int j, int t) {
    const Vec2 a = grid.point(i, j);
    const Vec2 b = grid.point(i + oi[t], j + oj[t]);
    if (has_poles) {
      // Near a pole disk the full quadrature (with analytic endpoint
      // handling) is required; elsewhere a fixed rule is exact to round-off
      // at edge scale.
      const double guard = r_disk + 3.0 * h;
      for (const auto& p : m.poles())
        if (flat_distance(p.pos, a) < guard) return segment_length_split(a, b, m, 1e-9);
    }
    const Vec2 delta = torus_delta(a, b);
    const double len = norm(delta);
    double s = 0.0;
    static const double gx[6] = {-0.9324695142031521, -0.6612093864662645,
                                 -0.2386191860831969, 0.2386191860831969,
                                 0.6612093864662645,  0.9324695142031521};
    static const double gw[6] = {0.1713244923791704, 0.3607615730481386,
                                 0.4679139345726910, 0.4679139345726910,
                                 0.3607615730481386, 0.1713244923791704};
    for (int q = 0; q < 6; ++q) {
      const double tq = 0.5 * (1.0 + gx[q]);
      const Vec2 z = wrap01(Vec2{a.x + tq * delta.x, a.y + tq * delta.y});
      s += gw[q] * std::exp(0.5 * m.log_factor(z));
    }
    return 0.5 * len * s;
  };

  std::vector<double> dist(N, kInf);
  std::vector<char> done(N, 0);
  MinHeap heap;
  dist[grid.index(si, sj)] = 0.0;
  heap.push({0.0, static_cast<std::uint32_t>(grid.index(si, sj))});

  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    if (done[top.idx] || top.d > dist[top.idx]) continue;
    done[top.idx] = 1;
    const int i = static_cast<int>(top.idx % n);
    const int j = static_cast<int>(top.idx / n);
    for (int t = 0; t < 16; ++t) {
      const std::size_t nb = grid.index(i + oi[t], j + oj[t]);
      if (done[nb]) continue;
      const double w = edge_weight(i, j, t);
      const double cand = top.d + w;
      if (cand < dist[nb]) {
        dist[nb] = cand;
        heap.push({cand, static_cast<std::uint32_t>(nb)});
      }
    }
  }

  DistanceField out;
  out.source = src_node;
  out.values = ScalarField(grid, std::move(dist));
  out.method = "lattice";
  out.metric_tag = m.tag();
  return out;
}

DistanceField dT_distance(std::shared_ptr<const SingularPotential> plus,
                          std::shared_ptr<const SingularPotential> minus,
                          double c, Vec2 source) {
  if (minus->max_nu() >= 2.0)
    throw std::runtime_error("cusp: density not integrable");
  ConformalMetric m = ConformalMetric::from_pair(std::move(plus), std::move(minus), c,
                                                 "limit-current");
  DistanceField d = eikonal_distance(m, source);
  d.t_or_limit = -1.0;
  return d;
}

HolderFit holder_fit(const std::vector<double>& dA, const std::vector<double>& dB,
                     bool upper_envelope) {
  if (dA.size() != dB.size()) throw std::invalid_argument("holder_fit: size mismatch");
  if (dA.size() < 20) throw std::runtime_error("holder_fit: need at least 20 pairs");
  double lo = kInf, hi = 0.0;
  for (double b : dB) {
    if (b <= 0.0) throw std::runtime_error("holder_fit: nonpositive dB value");
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  if (hi / lo < 100.0)
    throw std::runtime_error("holder_fit: dB span below two decades (degenerate)");

  const std::size_t N = dA.size();
  double mx = 0, my = 0;
  std::vector<double> lx(N), ly(N);
  for (std::size_t i = 0; i < N; ++i) {
    lx[i] = std::log(dB[i]);
    ly[i] = std::log(std::max(dA[i], 1e-300));
    mx += lx[i];
    my += ly[i];
  }
  mx /= N;
  my /= N;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < N; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  HolderFit fit;
  fit.upper = upper_envelope;
  fit.exponent = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = ly[i] - (my + fit.exponent * (lx[i] - mx));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / N);
  fit.constant = envelope_constant(dA, dB, fit.exponent, upper_envelope);
  if (!(fit.exponent > 0.0 && fit.exponent < 3.0))
    throw std::runtime_error("holder_fit: exponent outside (0,3): " +
                             std::to_string(fit.exponent));
  return fit;
}

double envelope_constant(const std::vector<double>& dA, const std::vector<double>& dB,
                         double alpha, bool upper_envelope) {
  double c = upper_envelope ? 0.0 : kInf;
  for (std::size_t i = 0; i < dA.size(); ++i) {
    const double ratio = dA[i] / std::pow(dB[i], alpha);
    c = upper_envelope ? std::max(c, ratio) : std::min(c, ratio);
  }
  return c;
}

double radial_exponent_fit(const DistanceField& d, Vec2 center, double r_min,
                           double r_max, int n_radii, int n_angles) {
  std::vector<double> lx, ly;
  for (int k = 0; k < n_radii; ++k) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (n_radii - 1));
    double acc = 0.0;
    for (int q = 0; q < n_angles; ++q) {
      const double th = 2.0 * 3.14159265358979323846 * q / n_angles;
      acc += d.at_point(wrap01(Vec2{center.x + r * std::cos(th), center.y + r * std::sin(th)}));
    }
    lx.push_back(std::log(r));
    ly.push_back(std::log(std::max(acc / n_angles, 1e-300)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= lx.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

double sup_discrepancy(const DistanceField& d1, const DistanceField& d2,
                       const std::vector<Vec2>& targets) {
  double m = 0.0;
  for (const Vec2& t : targets)
    m = std::max(m, std::fabs(d1.at_point(t) - d2.at_point(t)));
  return m;
}

}  // namespace krf
