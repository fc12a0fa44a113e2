// Clearance-constrained 26-connected A* over the occupancy grid, with
// iterative shortcut post-processing and heading assignment.
//
// Cost model: each step costs res * |step| (|step| in {1, sqrt2, sqrt3}),
// multiplied by `unknown_penalty` when the destination voxel is Unknown.
// Occupied voxels and voxels with obs_dist < d_min are not traversable.
// The Euclidean heuristic is admissible because unknown_penalty >= 1, and
// nodes may be re-expanded on a strictly better g, so the search settles the
// exact minimum float cost per voxel (matching an independent Dijkstra).
#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "coguide/frames.hpp"
#include "coguide/voxel_map.hpp"

namespace coguide {

struct PlanRequest {
  const OccupancyMap* map = nullptr;
  Pose start;
  Pose goal;
  double d_min = 0.0;             // clearance to occupied voxel centers
  double unknown_penalty = 2.0;   // step-cost multiplier into Unknown voxels
  double timeout = 10.0;          // seconds, wall clock
};

struct PlanResult {
  std::optional<Path> path;
  std::size_t nodes_expanded = 0;
  double elapsed = 0.0;
  double raw_cost = 0.0;  // grid-optimal cost before post-processing
};

namespace planner_detail {

struct Neighbor {
  int dx, dy, dz;
  double len;  // in voxel units
};

inline const std::array<Neighbor, 26>& neighbors26() {
  static const std::array<Neighbor, 26> n = [] {
    std::array<Neighbor, 26> out{};
    int i = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          out[i++] = {dx, dy, dz, std::sqrt(double(dx * dx + dy * dy + dz * dz))};
        }
    return out;
  }();
  return n;
}

/// Nearest voxel (by center distance, ties on flat index) within `radius`
/// of `from` whose clearance admits d_min. Returns false when none exists.
inline bool nearest_valid_voxel(const OccupancyMap& map, const Vec3& from, double d_min,
                                double radius, VoxelIndex& out) {
  const double res = map.resolution();
  const VoxelIndex c = map.index_of(from);
  const int r = static_cast<int>(std::ceil(radius / res)) + 1;
  double best_d2 = kInfinity;
  bool found = false;
  for (int dz = -r; dz <= r; ++dz)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const VoxelIndex v{c.x + dx, c.y + dy, c.z + dz};
        if (!map.in_bounds(v)) continue;
        if (map.state_at(v) == CellState::Occupied) continue;
        if (map.obs_dist_at(v) < d_min) continue;
        const Vec3 ctr = map.center_of(v);
        const double d2 = (ctr - from).squared_norm();
        if (d2 > radius * radius) continue;
        if (d2 < best_d2) {
          best_d2 = d2;
          out = v;
          found = true;
        }
      }
  return found;
}

}  // namespace planner_detail

/// Sample the straight segment [a, b] at step res/2 (both endpoints
/// included); true when every sample keeps obs_dist >= d_min.
inline bool segment_has_clearance(const OccupancyMap& map, const Vec3& a, const Vec3& b,
                                  double d_min) {
  const double step = map.resolution() / 2.0;
  const double len = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const Vec3 p = a + (b - a) * (static_cast<double>(i) / n);
    if (map.obs_dist(p) < d_min) return false;
  }
  return true;
}

/// Iterative shortcutting: repeatedly replace pose subsequences by straight
/// segments whose sampled points keep clearance, until a full pass changes
/// nothing. Arc length never increases; kept poses are unchanged.
inline Path postprocess(const Path& path, const OccupancyMap& map, double d_min) {
  if (path.size() < 3) return path;
  std::vector<Pose> poses = path.poses;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Pose> next;
    next.reserve(poses.size());
    std::size_t i = 0;
    next.push_back(poses[0]);
    while (i + 1 < poses.size()) {
      std::size_t j = poses.size() - 1;
      for (; j > i + 1; --j) {
        if (segment_has_clearance(map, poses[i].position, poses[j].position, d_min)) break;
      }
      if (j > i + 1) changed = true;
      next.push_back(poses[j]);
      i = j;
    }
    poses = std::move(next);
  }
  return Path(std::move(poses));
}

/// Heading assignment: interior poses face their outgoing segment (projected
/// to xy), the final pose takes goal_heading, zero-length segments inherit.
inline Path assign_headings(const Path& path, double goal_heading) {
  detail::require(!path.empty(), "assign_headings: empty path");
  std::vector<Pose> poses = path.poses;
  for (std::size_t i = 0; i + 1 < poses.size(); ++i) {
    const Vec2 d = (poses[i + 1].position - poses[i].position).xy();
    if (d.x != 0.0 || d.y != 0.0) {
      poses[i].heading = wrap_angle(std::atan2(d.y, d.x));
    } else {
      poses[i].heading = i == 0 ? wrap_angle(goal_heading) : poses[i - 1].heading;
    }
  }
  poses.back().heading = wrap_angle(goal_heading);
  return Path(std::move(poses));
}

/// Raw 26-connected A*: grid-optimal voxel-center path for the cost model
/// above, or nullopt when unreachable / timed out. Start and goal snap to the
/// nearest valid voxel within 2*d_min when they violate clearance.
inline PlanResult find_path_raw(const PlanRequest& req) {
  using namespace planner_detail;
  detail::require(req.map != nullptr, "find_path: null map");
  detail::require(req.d_min >= 0.0, "find_path: d_min must be >= 0");
  detail::require(req.timeout > 0.0, "find_path: timeout must be > 0");
  const OccupancyMap& map = *req.map;
  const double res = map.resolution();
  const auto t0 = std::chrono::steady_clock::now();

  PlanResult result;
  auto finish = [&](PlanResult r) {
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  VoxelIndex start_v, goal_v;
  const double snap_radius = 2.0 * req.d_min;
  if (!nearest_valid_voxel(map, req.start.position, req.d_min,
                           std::max(snap_radius, res), start_v))
    return finish(result);
  if (!nearest_valid_voxel(map, req.goal.position, req.d_min,
                           std::max(snap_radius, res), goal_v))
    return finish(result);

  const int nx = map.nx(), ny = map.ny();
  auto flat = [&](const VoxelIndex& v) {
    return (static_cast<std::size_t>(v.z) * ny + v.y) * nx + v.x;
  };
  auto unflat = [&](std::size_t f) {
    const int x = static_cast<int>(f % nx);
    const int y = static_cast<int>((f / nx) % ny);
    const int z = static_cast<int>(f / (static_cast<std::size_t>(nx) * ny));
    return VoxelIndex{x, y, z};
  };
  const Vec3 goal_c = map.center_of(goal_v);
  // The tiny deflation keeps the heuristic consistent under float rounding
  // (exact cost equality with the Dijkstra oracle depends on it).
  auto heuristic = [&](const VoxelIndex& v) {
    return (map.center_of(v) - goal_c).norm() * (1.0 - 1e-9);
  };

  std::vector<double> g(map.cell_count(), kInfinity);
  std::vector<std::int64_t> parent(map.cell_count(), -1);

  struct Open {
    double f;
    double g_at_push;
    std::size_t idx;
    bool operator<(const Open& o) const {
      if (f != o.f) return f > o.f;  // min-heap on f
      return idx > o.idx;            // lexicographic voxel tie-break
    }
  };
  std::priority_queue<Open> open;
  const std::size_t sidx = flat(start_v);
  g[sidx] = 0.0;
  open.push({heuristic(start_v), 0.0, sidx});

  const std::size_t gidx = flat(goal_v);
  bool reached = false;
  while (!open.empty()) {
    const Open cur = open.top();
    open.pop();
    const std::size_t ci = cur.idx;
    const VoxelIndex cv = unflat(ci);
    const double gc = g[ci];
    if (cur.g_at_push != gc) continue;  // stale entry
    if (ci == gidx) {
      reached = true;
      break;
    }
    ++result.nodes_expanded;
    if ((result.nodes_expanded & 0xFFF) == 0) {
      const double el =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (el > req.timeout) return finish(result);
    }
    for (const Neighbor& nb : neighbors26()) {
      const VoxelIndex v{cv.x + nb.dx, cv.y + nb.dy, cv.z + nb.dz};
      if (!map.in_bounds(v)) continue;
      const CellState s = map.state_at(v);
      if (s == CellState::Occupied) continue;
      if (map.obs_dist_at(v) < req.d_min) continue;
      double step = res * nb.len;
      if (s == CellState::Unknown) step *= req.unknown_penalty;
      const double cand = gc + step;
      const std::size_t vi = flat(v);
      if (cand < g[vi]) {
        g[vi] = cand;
        parent[vi] = static_cast<std::int64_t>(ci);
        open.push({cand + heuristic(v), cand, vi});
      }
    }
  }
  if (!reached) return finish(result);

  result.raw_cost = g[gidx];
  std::vector<Pose> poses;
  for (std::int64_t at = static_cast<std::int64_t>(gidx); at >= 0; at = parent[at]) {
    poses.push_back(Pose(map.center_of(unflat(static_cast<std::size_t>(at))), 0.0,
                         req.start.frame));
    if (static_cast<std::size_t>(at) == sidx) break;
  }
  std::reverse(poses.begin(), poses.end());
  result.path = Path(std::move(poses));
  return finish(result);
}

/// Full planning pipeline: raw A*, shortcut post-processing, headings.
inline PlanResult find_path(const PlanRequest& req) {
  PlanResult r = find_path_raw(req);
  if (r.path) {
    Path p = postprocess(*r.path, *req.map, req.d_min);
    r.path = assign_headings(p, req.goal.heading);
  }
  return r;
}

}  // namespace coguide
