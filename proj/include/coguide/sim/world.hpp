// Deterministic analytic worlds: axis-aligned boxes and vertical cylinders
// with exact ray intersection and point-distance queries, plus the canned
// environments used by the experiments (two rooms joined by a gap, Poisson
// forest, open space).
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "coguide/core.hpp"
#include "coguide/sim/rng.hpp"
#include "coguide/voxel_map.hpp"

namespace coguide::sim {

struct Aabb {
  Vec3 lo, hi;

  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 size() const { return hi - lo; }
};

struct VerticalCylinder {
  Vec2 center;
  double radius = 0.0;
  double z0 = 0.0, z1 = 0.0;
};

struct World {
  std::vector<Aabb> boxes;
  std::vector<VerticalCylinder> cylinders;
  Aabb bounds{};

  /// First intersection parameter t of ray o + t*d with the geometry,
  /// restricted to t in [0, t_max]; nullopt when nothing is hit.
  std::optional<double> raycast(const Vec3& o, const Vec3& d, double t_max) const {
    double best = t_max;
    bool hit = false;
    for (const Aabb& b : boxes) {
      double t;
      if (ray_box(o, d, b, best, t)) {
        best = t;
        hit = true;
      }
    }
    for (const VerticalCylinder& c : cylinders) {
      double t;
      if (ray_cylinder(o, d, c, best, t)) {
        best = t;
        hit = true;
      }
    }
    if (!hit) return std::nullopt;
    return best;
  }

  /// Exact distance from a point to the nearest geometry surface; negative
  /// inside an object. Used for ground-truth collision checks.
  double distance(const Vec3& p) const {
    double best = kInfinity;
    for (const Aabb& b : boxes) best = std::min(best, box_distance(p, b));
    for (const VerticalCylinder& c : cylinders) best = std::min(best, cylinder_distance(p, c));
    return best;
  }

  bool inside_obstacle(const Vec3& p) const { return distance(p) < 0.0; }

  static bool ray_box(const Vec3& o, const Vec3& d, const Aabb& b, double t_max, double& t_out) {
    double t0 = 0.0, t1 = t_max;
    const double od[3] = {o.x, o.y, o.z};
    const double dd[3] = {d.x, d.y, d.z};
    const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
    const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
    for (int a = 0; a < 3; ++a) {
      if (dd[a] == 0.0) {
        if (od[a] < lo[a] || od[a] > hi[a]) return false;
        continue;
      }
      double ta = (lo[a] - od[a]) / dd[a];
      double tb = (hi[a] - od[a]) / dd[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
    t_out = t0;
    return true;
  }

  static bool ray_cylinder(const Vec3& o, const Vec3& d, const VerticalCylinder& c, double t_max,
                           double& t_out) {
    // side surface: quadratic in the xy plane
    const double ox = o.x - c.center.x, oy = o.y - c.center.y;
    const double a = d.x * d.x + d.y * d.y;
    bool hit = false;
    double best = t_max;
    if (a > 0.0) {
      const double bq = 2.0 * (ox * d.x + oy * d.y);
      const double cq = ox * ox + oy * oy - c.radius * c.radius;
      const double disc = bq * bq - 4.0 * a * cq;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        for (const double t : {(-bq - sq) / (2.0 * a), (-bq + sq) / (2.0 * a)}) {
          if (t < 0.0 || t > best) continue;
          const double z = o.z + t * d.z;
          if (z >= c.z0 && z <= c.z1) {
            best = t;
            hit = true;
          }
        }
      }
    }
    // end caps
    if (d.z != 0.0) {
      for (const double zc : {c.z0, c.z1}) {
        const double t = (zc - o.z) / d.z;
        if (t < 0.0 || t > best) continue;
        const double x = o.x + t * d.x - c.center.x;
        const double y = o.y + t * d.y - c.center.y;
        if (x * x + y * y <= c.radius * c.radius) {
          best = t;
          hit = true;
        }
      }
    }
    if (hit) t_out = best;
    return hit;
  }

  static double box_distance(const Vec3& p, const Aabb& b) {
    const double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
    const double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
    const double dz = std::max({b.lo.z - p.z, 0.0, p.z - b.hi.z});
    if (dx > 0.0 || dy > 0.0 || dz > 0.0) return std::sqrt(dx * dx + dy * dy + dz * dz);
    // inside: negative distance to the nearest face
    const double inx = std::min(p.x - b.lo.x, b.hi.x - p.x);
    const double iny = std::min(p.y - b.lo.y, b.hi.y - p.y);
    const double inz = std::min(p.z - b.lo.z, b.hi.z - p.z);
    return -std::min({inx, iny, inz});
  }

  static double cylinder_distance(const Vec3& p, const VerticalCylinder& c) {
    const double dr = std::hypot(p.x - c.center.x, p.y - c.center.y) - c.radius;
    const double dz = std::max({c.z0 - p.z, 0.0, p.z - c.z1});
    if (dr <= 0.0) {
      if (dz > 0.0) return dz;
      return std::max(dr, std::max(c.z0 - p.z, p.z - c.z1));  // inside (negative)
    }
    return std::hypot(dr, dz);
  }
};

/// Two 10 m x 8 m x 5 m rooms separated by a 0.2 m wall at x = 0 with a
/// centered full-height slot of width w_G = 2*d_S + 1.5*res. Floor, ceiling,
/// and perimeter walls close the volume.
inline World make_gap_world(double d_S, double res) {
  detail::require(d_S > 0.0 && res > 0.0, "make_gap_world: d_S and res must be > 0");
  const double w_G = 2.0 * d_S + 1.5 * res;
  const double room_x = 10.0, room_y = 8.0, room_z = 5.0;
  const double t = 0.2;  // wall thickness
  const double hx = room_x + t;  // outer shell half-length in x

  World w;
  w.bounds = {{-hx - t, -room_y / 2.0 - t, -t}, {hx + t, room_y / 2.0 + t, room_z + t}};
  const double y0 = -room_y / 2.0, y1 = room_y / 2.0;
  // floor and ceiling
  w.boxes.push_back({{-hx, y0 - t, -t}, {hx, y1 + t, 0.0}});
  w.boxes.push_back({{-hx, y0 - t, room_z}, {hx, y1 + t, room_z + t}});
  // outer walls
  w.boxes.push_back({{-hx, y0 - t, 0.0}, {hx, y0, room_z}});
  w.boxes.push_back({{-hx, y1, 0.0}, {hx, y1 + t, room_z}});
  w.boxes.push_back({{-hx, y0, 0.0}, {-hx + t, y1, room_z}});
  w.boxes.push_back({{hx - t, y0, 0.0}, {hx, y1, room_z}});
  // dividing wall with the centered slot
  w.boxes.push_back({{-t / 2.0, y0, 0.0}, {t / 2.0, -w_G / 2.0, room_z}});
  w.boxes.push_back({{-t / 2.0, w_G / 2.0, 0.0}, {t / 2.0, y1, room_z}});
  return w;
}

inline double gap_width(double d_S, double res) { return 2.0 * d_S + 1.5 * res; }

/// Poisson forest: cylinders over a 50 m x 50 m area with a 2 m clearing
/// around the origin (the start area); deterministic per seed.
inline World make_forest_world(std::uint64_t seed, double density, double radius_lo,
                               double radius_hi, double extent = 50.0, double tree_height = 5.0) {
  detail::require(density >= 0.0, "make_forest_world: density must be >= 0");
  World w;
  const double half = extent / 2.0;
  w.bounds = {{-half, -half, -0.5}, {half, half, tree_height + 1.0}};
  // ground slab
  w.boxes.push_back({{-half, -half, -0.5}, {half, half, 0.0}});

  Rng rng(seed, /*stream=*/17);
  const int count = density > 0.0 ? rng.poisson(density * extent * extent) : 0;
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform(-half, half);
    const double y = rng.uniform(-half, half);
    const double r = rng.uniform(radius_lo, radius_hi);
    if (std::hypot(x, y) < 2.0 + r) continue;  // keep the start area clear
    w.cylinders.push_back({{x, y}, r, 0.0, tree_height});
  }
  return w;
}

/// Flat open space with a ground slab only.
inline World make_open_world(double extent = 30.0) {
  World w;
  const double half = extent / 2.0;
  w.bounds = {{-half, -half, -0.5}, {half, half, 6.0}};
  w.boxes.push_back({{-half, -half, -0.5}, {half, half, 0.0}});
  return w;
}

/// Ground-truth rasterization: every voxel whose center lies inside geometry
/// becomes Occupied, everything else Free (no Unknown).
inline void rasterize_world(const World& world, OccupancyMap& map) {
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y)
      for (int x = 0; x < map.nx(); ++x) {
        const VoxelIndex v{x, y, z};
        map.set_state(v, world.inside_obstacle(map.center_of(v)) ? CellState::Occupied
                                                                 : CellState::Free);
      }
}

}  // namespace coguide::sim
