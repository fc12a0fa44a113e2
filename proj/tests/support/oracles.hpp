// Test-only oracles, independent of the library implementation paths they
// check: a self-contained RNG, homogeneous-matrix pose transform, brute-force
// nearest-occupied search, a reference Dijkstra on the planner's cost model,
// scanline area measurement for polygon booleans, and small helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "coguide/core.hpp"
#include "coguide/poly2d.hpp"
#include "coguide/voxel_map.hpp"

namespace test_support {

/// Minimal deterministic generator (64-bit LCG + splitmix finalizer).
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : s_(seed * 2862933555777941757ull + 3037000493ull) {}

  std::uint64_t next() {
    s_ = s_ * 6364136223846793005ull + 1442695040888963407ull;
    std::uint64_t x = s_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t s_;
};

/// 4x4 homogeneous matrix application for a z-rotation + translation.
inline coguide::Vec3 mat4_apply(const coguide::Vec3& t, double yaw, const coguide::Vec3& p) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double m[4][4] = {{c, -s, 0, t.x}, {s, c, 0, t.y}, {0, 0, 1, t.z}, {0, 0, 0, 1}};
  const double in[4] = {p.x, p.y, p.z, 1.0};
  double out[4] = {0, 0, 0, 0};
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) out[r] += m[r][k] * in[k];
  return {out[0], out[1], out[2]};
}

/// O(n^2) nearest-occupied-center distance, in meters.
inline double brute_obs_dist(const coguide::OccupancyMap& map, const coguide::VoxelIndex& v) {
  double best = coguide::kInfinity;
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y)
      for (int x = 0; x < map.nx(); ++x) {
        if (map.state_at({x, y, z}) != coguide::CellState::Occupied) continue;
        const double dx = x - v.x, dy = y - v.y, dz = z - v.z;
        best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
      }
  return best * map.resolution();
}

/// Reference Dijkstra over the 26-connected grid with the planner's cost
/// model: step = res * |delta| (* penalty when entering Unknown), voxels
/// with obs_dist < d_min or Occupied are blocked. Returns +infinity when the
/// goal is unreachable.
inline double dijkstra_cost(const coguide::OccupancyMap& map, const coguide::VoxelIndex& start,
                            const coguide::VoxelIndex& goal, double d_min,
                            double unknown_penalty) {
  using coguide::CellState;
  using coguide::VoxelIndex;
  const int nx = map.nx(), ny = map.ny(), nz = map.nz();
  auto flat = [&](const VoxelIndex& v) {
    return (static_cast<std::size_t>(v.z) * ny + v.y) * nx + v.x;
  };
  std::vector<double> dist(static_cast<std::size_t>(nx) * ny * nz, coguide::kInfinity);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[flat(start)] = 0.0;
  pq.push({0.0, flat(start)});
  const double res = map.resolution();
  while (!pq.empty()) {
    const auto [d, fi] = pq.top();
    pq.pop();
    if (d > dist[fi]) continue;
    const int x = static_cast<int>(fi % nx);
    const int y = static_cast<int>((fi / nx) % ny);
    const int z = static_cast<int>(fi / (static_cast<std::size_t>(nx) * ny));
    if (x == goal.x && y == goal.y && z == goal.z) return d;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const VoxelIndex v{x + dx, y + dy, z + dz};
          if (!map.in_bounds(v)) continue;
          const CellState s = map.state_at(v);
          if (s == CellState::Occupied) continue;
          if (map.obs_dist_at(v) < d_min) continue;
          double step = res * std::sqrt(double(dx * dx + dy * dy + dz * dz));
          if (s == CellState::Unknown) step *= unknown_penalty;
          const double cand = d + step;
          const std::size_t vi = flat(v);
          if (cand < dist[vi]) {
            dist[vi] = cand;
            pq.push({cand, vi});
          }
        }
  }
  return dist[flat(goal)];
}

/// Scanline symmetric-difference area between a boolean combination of two
/// input multipolygons and a result multipolygon, measured on rows spaced
/// `row_h` apart (horizontal extent exact per row). Membership uses even-odd
/// crossings per row.
class ScanlineArea {
 public:
  using Mp = coguide::MultiPolygon;

  static double sym_diff(const Mp& a, const Mp& b, const Mp& result, coguide::BoolOp op,
                         double row_h) {
    coguide::Box2 bb = coguide::bounding_box(a);
    const coguide::Box2 bb2 = coguide::bounding_box(b);
    const coguide::Box2 bb3 = coguide::bounding_box(result);
    if (bb2.valid()) {
      bb.expand(bb2.lo);
      bb.expand(bb2.hi);
    }
    if (bb3.valid()) {
      bb.expand(bb3.lo);
      bb.expand(bb3.hi);
    }
    if (!bb.valid()) return 0.0;

    double total = 0.0;
    const int rows = static_cast<int>(std::ceil((bb.hi.y - bb.lo.y) / row_h)) + 1;
    for (int r = 0; r < rows; ++r) {
      const double y = bb.lo.y + (r + 0.5) * row_h;
      auto ia = crossings(a, y);
      auto ib = crossings(b, y);
      auto ir = crossings(result, y);
      const auto expect = combine_intervals(ia, ib, op);
      const auto got = to_intervals(ir);
      total += interval_symdiff_len(expect, got) * row_h;
    }
    return total;
  }

 private:
  static std::vector<double> crossings(const Mp& m, double y) {
    std::vector<double> xs;
    auto ring = [&](const coguide::Ring& r) {
      for (std::size_t i = 0, n = r.size(); i < n; ++i) {
        const coguide::Vec2& p = r[i];
        const coguide::Vec2& q = r[(i + 1) % n];
        if ((p.y <= y) == (q.y <= y)) continue;
        xs.push_back(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
      }
    };
    for (const coguide::Polygon& p : m.parts) {
      ring(p.outer);
      for (const coguide::Ring& h : p.holes) ring(h);
    }
    std::sort(xs.begin(), xs.end());
    return xs;
  }

  using Intervals = std::vector<std::pair<double, double>>;

  static Intervals to_intervals(const std::vector<double>& xs) {
    Intervals out;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) out.push_back({xs[i], xs[i + 1]});
    return out;
  }

  static Intervals combine_intervals(const std::vector<double>& a, const std::vector<double>& b,
                                     coguide::BoolOp op) {
    // walk event points; membership from crossing parity
    std::vector<double> events = a;
    events.insert(events.end(), b.begin(), b.end());
    std::sort(events.begin(), events.end());
    Intervals out;
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
      const double lo = events[i], hi = events[i + 1];
      if (hi <= lo) continue;
      const double mid = (lo + hi) / 2.0;
      const bool in_a = parity(a, mid);
      const bool in_b = parity(b, mid);
      bool in = false;
      switch (op) {
        case coguide::BoolOp::Union: in = in_a || in_b; break;
        case coguide::BoolOp::Intersection: in = in_a && in_b; break;
        case coguide::BoolOp::Difference: in = in_a && !in_b; break;
      }
      if (in) {
        if (!out.empty() && out.back().second == lo)
          out.back().second = hi;
        else
          out.push_back({lo, hi});
      }
    }
    return out;
  }

  static bool parity(const std::vector<double>& xs, double x) {
    std::size_t k = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    return (k % 2) == 1;
  }

  static double interval_symdiff_len(const Intervals& a, const Intervals& b) {
    // measure |A xor B| by sweeping merged endpoints
    std::vector<double> pts;
    for (const auto& [lo, hi] : a) {
      pts.push_back(lo);
      pts.push_back(hi);
    }
    for (const auto& [lo, hi] : b) {
      pts.push_back(lo);
      pts.push_back(hi);
    }
    std::sort(pts.begin(), pts.end());
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double lo = pts[i], hi = pts[i + 1];
      if (hi <= lo) continue;
      const double mid = (lo + hi) / 2.0;
      if (contains(a, mid) != contains(b, mid)) len += hi - lo;
    }
    return len;
  }

  static bool contains(const Intervals& iv, double x) {
    for (const auto& [lo, hi] : iv)
      if (x >= lo && x <= hi) return true;
    return false;
  }
};

}  // namespace test_support
