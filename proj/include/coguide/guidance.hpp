// Cooperative planner: guiding-viewpoint selection over visibility polygons
// (raycast star regions, safety buffer, safe-space slice, iterative
// intersection, pole of inaccessibility), the planning step that produces
// paths for both vehicles, the periodic guide step that re-expresses and
// prunes the secondary's path, and the mission FSM driving it all.
#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "coguide/frames.hpp"
#include "coguide/planner.hpp"
#include "coguide/poly2d.hpp"
#include "coguide/voxel_map.hpp"

namespace coguide {

/// Planner/guidance parameters; defaults follow the forest-flight set
/// (map resolution 0.1 m assumed by the defaults, configured on the map).
struct GuidanceParams {
  double w_P = 1.5;    // primary occupied-space footprint width [m]
  double h_P = 10.0;   // primary occupied-space height [m]
  double w_S = 1.3;    // secondary occupied-space footprint width [m]
  double h_S = 10.0;   // secondary occupied-space height [m]
  double d_P = 0.9;    // primary min obstacle distance [m]
  double d_S = 0.8;    // secondary min obstacle distance [m]
  int n_samples = 500; // visibility raycast count per waypoint
  double d_ray = 6.0;  // visibility raycast max length [m]
  double d_buffer = 2.0;  // min distance of the primary from the secondary path [m]
  double delta = 0.5;     // waypoint visited-distance threshold [m]
  double replan_rate = 1.0;  // plan attempt pacing in PLANNING [Hz]
  double guide_rate = 5.0;   // guide-step emission rate [Hz]

  void validate() const {
    detail::require(w_P > 0 && h_P > 0 && w_S > 0 && h_S > 0 && d_P > 0 && d_S > 0 &&
                        d_ray > 0 && d_buffer > 0 && delta > 0 && replan_rate > 0 &&
                        guide_rate > 0,
                    "GuidanceParams: all values must be positive");
    detail::require(n_samples >= 8, "GuidanceParams: n_samples must be >= 8");
  }
};

enum class FsmState { Idle, Planning, PrimaryMoving, SecondaryMoving, GoalReached, Failure };

inline const char* to_string(FsmState s) {
  switch (s) {
    case FsmState::Idle: return "IDLE";
    case FsmState::Planning: return "PLANNING";
    case FsmState::PrimaryMoving: return "PRIMARY_MOVING";
    case FsmState::SecondaryMoving: return "SECONDARY_MOVING";
    case FsmState::GoalReached: return "GOAL_REACHED";
    case FsmState::Failure: return "FAILURE";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Visibility / safe-space geometry
// ---------------------------------------------------------------------------

/// Star-shaped polygon of first obstacle intersections (or ray endpoints at
/// d_ray) of n_samples equiangular horizontal rays cast from the waypoint at
/// its own altitude. A waypoint inside an Occupied voxel yields a degenerate
/// near-empty polygon.
inline Polygon visibility_region(const OccupancyMap& map, const Pose& waypoint,
                                 const GuidanceParams& params) {
  detail::require(map.contains(waypoint.position), "visibility_region: waypoint outside region");
  Ring ring;
  ring.reserve(params.n_samples);
  const Vec3 p = waypoint.position;
  for (int k = 0; k < params.n_samples; ++k) {
    const double a = 2.0 * M_PI * k / params.n_samples;
    const Vec3 end = p + Vec3{params.d_ray * std::cos(a), params.d_ray * std::sin(a), 0.0};
    const Vec3 hit = map.raycast_surface(p, end);
    ring.push_back(hit.xy());
  }
  return Polygon{std::move(ring), {}};
}

namespace guidance_detail {

/// Per-row even-odd crossings of a multipolygon, for fast membership of many
/// grid points sharing y rows.
struct RowCrossings {
  std::vector<std::vector<double>> xs;  // sorted crossing xs per row
  double y0 = 0.0, dy = 1.0;
  int rows = 0;

  void build(const MultiPolygon& mp, double y0_, double dy_, int rows_) {
    y0 = y0_;
    dy = dy_;
    rows = rows_;
    xs.assign(rows_, {});
    auto add_ring = [&](const Ring& r) {
      for (std::size_t i = 0, n = r.size(); i < n; ++i) {
        const Vec2& a = r[i];
        const Vec2& b = r[(i + 1) % n];
        if (a.y == b.y) continue;
        const double ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
        int r0 = static_cast<int>(std::ceil((ylo - y0) / dy));
        int r1 = static_cast<int>(std::floor((yhi - y0) / dy));
        r0 = std::max(r0, 0);
        r1 = std::min(r1, rows - 1);
        for (int row = r0; row <= r1; ++row) {
          const double y = y0 + row * dy;
          // half-open rule: count the edge when min(y) <= y < max(y)
          if (y < ylo || y >= yhi) continue;
          xs[row].push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
    };
    for (const Polygon& p : mp.parts) {
      add_ring(p.outer);
      for (const Ring& h : p.holes) add_ring(h);
    }
    for (auto& v : xs) std::sort(v.begin(), v.end());
  }

  bool inside(int row, double x) const {
    const auto& v = xs[row];
    const auto it = std::upper_bound(v.begin(), v.end(), x);
    return ((it - v.begin()) % 2) == 1;
  }
};

/// Trace the boundary of a boolean cell mask into maximal polygons with
/// holes; adjacency is 4-connected, corner-touching cells stay separate
/// parts. Collinear runs are merged.
inline MultiPolygon mask_to_multipolygon(const std::vector<char>& mask, int nx, int ny,
                                         const Vec2& corner0, double res) {
  struct CEdge {
    int ax, ay, bx, by;
  };
  auto at = [&](int x, int y) {
    return x >= 0 && x < nx && y >= 0 && y < ny && mask[static_cast<std::size_t>(y) * nx + x];
  };
  std::vector<CEdge> edges;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      if (!at(x, y)) continue;
      if (!at(x, y - 1)) edges.push_back({x, y, x + 1, y});          // bottom, +x
      if (!at(x + 1, y)) edges.push_back({x + 1, y, x + 1, y + 1});  // right, +y
      if (!at(x, y + 1)) edges.push_back({x + 1, y + 1, x, y + 1});  // top, -x
      if (!at(x - 1, y)) edges.push_back({x, y + 1, x, y});          // left, -y
    }

  std::map<std::pair<int, int>, std::vector<int>> outgoing;
  for (std::size_t i = 0; i < edges.size(); ++i)
    outgoing[{edges[i].ax, edges[i].ay}].push_back(static_cast<int>(i));

  auto turn_rank = [](int dinx, int diny, int dx, int dy) {
    const int s = dinx * dy - diny * dx;
    const int c = dinx * dx + diny * dy;
    if (s > 0) return 0;            // left turn: sharpest
    if (s == 0 && c > 0) return 3;  // straight on: last
    if (s == 0) return 1;           // straight back
    return 2;                       // right turn
  };

  std::vector<char> used(edges.size(), 0);
  std::vector<Ring> rings;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> chain;
    int cur = static_cast<int>(start);
    bool ok = true;
    for (std::size_t guard = 0; guard <= edges.size(); ++guard) {
      chain.push_back(cur);
      used[cur] = 1;
      const CEdge& e = edges[cur];
      const int dinx = e.bx - e.ax, diny = e.by - e.ay;
      const auto it = outgoing.find({e.bx, e.by});
      if (it == outgoing.end()) {
        ok = false;
        break;
      }
      int next = -1, best_rank = 9;
      for (int cand : it->second) {
        const int rank = turn_rank(dinx, diny, edges[cand].bx - edges[cand].ax,
                                   edges[cand].by - edges[cand].ay);
        if (rank < best_rank) {
          best_rank = rank;
          next = cand;
        }
      }
      if (next < 0) {
        ok = false;
        break;
      }
      if (next == static_cast<int>(start)) break;
      if (used[next]) {
        ok = false;
        break;
      }
      cur = next;
    }
    if (!ok || chain.size() < 4) continue;
    Ring r;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const CEdge& e = edges[chain[i]];
      const CEdge& prev = edges[chain[(i + chain.size() - 1) % chain.size()]];
      const bool collinear = (e.bx - e.ax) == (prev.bx - prev.ax) &&
                             (e.by - e.ay) == (prev.by - prev.ay);
      if (!collinear)
        r.push_back({corner0.x + e.ax * res, corner0.y + e.ay * res});
    }
    if (r.size() >= 3) rings.push_back(std::move(r));
  }
  return poly_detail::assemble_parts(std::move(rings));
}

}  // namespace guidance_detail

namespace guidance_detail {

/// Safe-space mask + polygons for one altitude slice: cell centers with
/// obs_dist > d_P, more than d_P inside the mapped xy extent (space beyond
/// the region cannot be proven safe), and inside the visibility membership
/// predicate. `member(row, x, y)` is evaluated per cell center.
template <typename Member>
MultiPolygon safe_region_impl(const OccupancyMap& map, double z, double d_P, Member&& member) {
  const double res = map.resolution();
  const int nx = map.nx(), ny = map.ny();
  const VoxelIndex zref = map.index_of(Vec3{map.origin().x, map.origin().y, z});
  const int iz = zref.z;
  detail::require(iz >= 0 && iz < map.nz(), "safe_region: z outside region");

  const Vec2 corner0 = {map.origin().x, map.origin().y};
  std::vector<char> mask(static_cast<std::size_t>(nx) * ny, 0);
  const double margin = d_P / res;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const double cx = x + 0.5, cy = y + 0.5;
      if (cx <= margin || cy <= margin || (nx - cx) <= margin || (ny - cy) <= margin) continue;
      const VoxelIndex v{x, y, iz};
      const double od = map.obs_dist_at(v);
      if (!(od > d_P)) continue;
      const Vec2 c{corner0.x + cx * res, corner0.y + cy * res};
      if (!member(y, c.x, c.y)) continue;
      mask[static_cast<std::size_t>(y) * nx + x] = 1;
    }
  }
  return mask_to_multipolygon(mask, nx, ny, corner0, res);
}

}  // namespace guidance_detail

/// Union of voxel squares at the altitude slice of z whose centers satisfy
/// obs_dist > d_P and lie inside vis_union; adjacent squares merge into
/// maximal polygons.
inline MultiPolygon safe_region(const OccupancyMap& map, double z, double d_P,
                                const MultiPolygon& vis_union) {
  using guidance_detail::RowCrossings;
  if (vis_union.empty()) return {};
  RowCrossings rc;
  rc.build(vis_union, map.origin().y + 0.5 * map.resolution(), map.resolution(), map.ny());
  return guidance_detail::safe_region_impl(
      map, z, d_P, [&](int row, double x, double) { return rc.inside(row, x); });
}

struct ViewpointDebug {
  MultiPolygon buffer;                    // B
  std::vector<MultiPolygon> visibility;   // V_i after differencing with B
  MultiPolygon safe;                      // S
  MultiPolygon intersection;              // final I_all
};

struct ViewpointResult {
  std::optional<Vec3> point;  // guiding viewpoint at the primary's altitude
  int prefix = 0;             // waypoints covered by the final intersection
};

/// Guiding-viewpoint selection: buffer the secondary path, build per-waypoint
/// visibility regions minus the buffer, slice the safe space at the primary's
/// altitude, pick the safe component closest to the primary, intersect it
/// with consecutive visibility regions until empty, and return the pole of
/// inaccessibility (of the intersection part whose pole is nearest the
/// primary). Absent iff the first intersection is already empty.
inline ViewpointResult find_guiding_viewpoint(const OccupancyMap& map, const Path& path_S,
                                              const Vec3& x_P, const GuidanceParams& params,
                                              ViewpointDebug* debug = nullptr) {
  detail::require(!path_S.empty(), "find_guiding_viewpoint: empty path");
  params.validate();
  const double res = map.resolution();

  std::vector<Vec2> polyline;
  polyline.reserve(path_S.size());
  for (const Pose& p : path_S.poses) polyline.push_back(p.position.xy());
  const MultiPolygon buffer = buffer_polyline(polyline, params.d_buffer);

  std::vector<MultiPolygon> vis;
  vis.reserve(path_S.size());
  for (const Pose& wp : path_S.poses) {
    const Polygon raw = visibility_region(map, wp, params);
    vis.push_back(boolean_op(BoolOp::Difference, MultiPolygon{{raw}}, buffer));
  }
  if (debug) {
    debug->buffer = buffer;
    debug->visibility = vis;
  }

  // membership in the union of all V_i via per-region row crossings
  std::vector<guidance_detail::RowCrossings> rows(vis.size());
  for (std::size_t i = 0; i < vis.size(); ++i)
    rows[i].build(vis[i], map.origin().y + 0.5 * res, res, map.ny());
  const MultiPolygon safe = guidance_detail::safe_region_impl(
      map, x_P.z, params.d_P, [&](int row, double x, double) {
        for (const auto& rc : rows)
          if (rc.inside(row, x)) return true;
        return false;
      });
  if (debug) debug->safe = safe;
  if (safe.empty()) return {};

  std::size_t closest = 0;
  double closest_d = kInfinity;
  for (std::size_t i = 0; i < safe.parts.size(); ++i) {
    const double d = distance_to(x_P.xy(), MultiPolygon{{safe.parts[i]}});
    if (d < closest_d) {
      closest_d = d;
      closest = i;
    }
  }

  MultiPolygon inter{{safe.parts[closest]}};
  int prefix = 0;
  for (const MultiPolygon& v : vis) {
    MultiPolygon next = boolean_op(BoolOp::Intersection, inter, v);
    if (next.empty()) break;
    inter = std::move(next);
    ++prefix;
  }
  if (prefix == 0) return {};
  if (debug) debug->intersection = inter;

  const double precision = res / 2.0;
  std::optional<Vec2> best;
  double best_d = kInfinity;
  for (const Polygon& part : inter.parts) {
    const auto [pt, clearance] = pole_of_inaccessibility(part, precision);
    (void)clearance;
    const double d = (pt - x_P.xy()).norm();
    if (d < best_d) {
      best_d = d;
      best = pt;
    }
  }
  if (!best) return {};
  return {Vec3{best->x, best->y, x_P.z}, prefix};
}

// ---------------------------------------------------------------------------
// Planning step (one shot) and guiding step
// ---------------------------------------------------------------------------

struct PlanStepResult {
  FsmState state = FsmState::Failure;
  std::optional<Path> path_P;
  std::optional<Path> path_S;
  std::optional<Vec3> viewpoint;
};

/// One planning pass: check goal proximity, plan the secondary path on a map
/// with the primary blocked out, select the guiding viewpoint, then plan the
/// primary path on a map with the secondary blocked out. Every failure mode
/// is an FSM transition, not an exception.
inline PlanStepResult plan_step(const OccupancyMap& map, const Pose& pose_P, const Pose& pose_S,
                                const Pose& goal_S, const GuidanceParams& params,
                                ViewpointDebug* debug = nullptr) {
  params.validate();
  PlanStepResult out;
  const double res = map.resolution();

  if ((pose_S.position - goal_S.position).norm() < res) {
    out.state = FsmState::GoalReached;
    return out;
  }

  const OccupancyMap map_S = map.add_obstacle_box(pose_P.position, params.w_P, params.h_P);
  PlanRequest req_S;
  req_S.map = &map_S;
  req_S.start = pose_S;
  req_S.goal = goal_S;
  req_S.d_min = params.d_S;
  const PlanResult res_S = find_path(req_S);
  if (!res_S.path) {
    out.state = FsmState::Failure;
    return out;
  }

  const ViewpointResult vp = find_guiding_viewpoint(map, *res_S.path, pose_P.position, params,
                                                    debug);
  if (!vp.point) {
    out.state = FsmState::Failure;
    return out;
  }
  out.viewpoint = vp.point;
  out.path_S = res_S.path;

  if ((pose_P.position - *vp.point).norm() < res) {
    out.state = FsmState::SecondaryMoving;
    return out;
  }

  const OccupancyMap map_P = map.add_obstacle_box(pose_S.position, params.w_S, params.h_S);
  // the primary's goal heading faces the secondary path start so the sensor
  // field of view covers the teammate
  const Vec2 look = res_S.path->poses.front().position.xy() - vp.point->xy();
  const double theta_P = std::atan2(look.y, look.x);
  PlanRequest req_P;
  req_P.map = &map_P;
  req_P.start = pose_P;
  req_P.goal = Pose(*vp.point, theta_P, pose_P.frame);
  req_P.d_min = params.d_P;
  const PlanResult res_P = find_path(req_P);
  if (!res_P.path) {
    out.state = FsmState::Failure;
    return out;
  }
  out.path_P = res_P.path;
  out.state = FsmState::PrimaryMoving;
  return out;
}

/// Re-express a path in the secondary body frame and prune the leading
/// poses closer than `delta` (visited waypoints). May return an empty path.
inline Path guide_step(const Path& path_L, const Transform4DOF& T_SL, double delta) {
  const Path in_S = apply_path(T_SL, path_L);
  std::size_t k = 0;
  while (k < in_S.size() && in_S.poses[k].position.norm() < delta) ++k;
  return Path(std::vector<Pose>(in_S.poses.begin() + k, in_S.poses.end()));
}

// ---------------------------------------------------------------------------
// Mission FSM
// ---------------------------------------------------------------------------

struct FsmConfig {
  bool auto_increment = false;  // on GOAL_REACHED, queue the next goal +increment in x
  Vec3 increment{4.0, 0.0, 0.0};
  int max_goals = 1;  // total goals processed in auto-increment mode
};

struct FsmInputs {
  double t = 0.0;
  const OccupancyMap* map = nullptr;
  Pose pose_P;       // primary pose in L
  Pose pose_S_est;   // secondary pose estimate in L (relative localization)
  std::optional<Transform4DOF> T_SL;  // maps L -> S, for guide steps
  bool primary_hovering = true;
  bool secondary_hovering = true;
};

struct FsmOutputs {
  FsmState state = FsmState::Idle;
  std::optional<Path> primary_path;      // command for the primary, in L
  std::optional<Path> secondary_path_S;  // guide message for the secondary, in S
  bool planned = false;                  // a plan_step ran this tick
};

struct TraceRow {
  double t;
  std::string state;
  std::string event;
};

class GuidanceFsm {
 public:
  GuidanceFsm(GuidanceParams params, FsmConfig cfg = {})
      : params_(params), cfg_(cfg) {
    params_.validate();
  }

  FsmState state() const { return state_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const std::optional<Vec3>& viewpoint() const { return viewpoint_; }
  const std::optional<Path>& stored_secondary_path() const { return path_S_; }

  /// True once the goal queue is drained (including auto-increment budget)
  /// and the FSM rests in GOAL_REACHED.
  bool mission_complete() const {
    if (state_ != FsmState::GoalReached || !goals_.empty()) return false;
    return !cfg_.auto_increment || goals_done_ >= cfg_.max_goals;
  }
  void set_debug_capture(bool on) { capture_debug_ = on; }
  const ViewpointDebug& last_debug() const { return debug_; }

  void push_goal(const Pose& goal) {
    goals_.push_back(goal);
    if (state_ == FsmState::Failure) {
      // a new external goal clears the terminal failure
      transition(last_t_, FsmState::Idle, "new_goal_after_failure");
    }
  }

  FsmOutputs tick(const FsmInputs& in) {
    detail::require(in.map != nullptr, "fsm tick: null map");
    last_t_ = in.t;
    FsmOutputs out;

    switch (state_) {
      case FsmState::Idle:
        if (!goals_.empty()) {
          goal_ = goals_.front();
          goals_.pop_front();
          next_plan_time_ = in.t;
          transition(in.t, FsmState::Planning, "goal_accepted");
        }
        break;

      case FsmState::Planning: {
        if (!(in.primary_hovering && in.secondary_hovering)) break;
        if (in.t + 1e-9 < next_plan_time_) break;
        next_plan_time_ = in.t + 1.0 / params_.replan_rate;
        const PlanStepResult r = plan_step(*in.map, in.pose_P, in.pose_S_est, *goal_, params_,
                                           capture_debug_ ? &debug_ : nullptr);
        out.planned = true;
        viewpoint_ = r.viewpoint;
        path_S_ = r.path_S;
        if (r.state == FsmState::PrimaryMoving) {
          out.primary_path = r.path_P;
          transition(in.t, FsmState::PrimaryMoving, "paths_planned");
        } else if (r.state == FsmState::SecondaryMoving) {
          next_guide_time_ = in.t;
          transition(in.t, FsmState::SecondaryMoving, "primary_at_viewpoint");
          emit_guide(in, out);
        } else if (r.state == FsmState::GoalReached) {
          transition(in.t, FsmState::GoalReached, "goal_already_reached");
        } else {
          transition(in.t, FsmState::Failure, "planning_failed");
        }
        break;
      }

      case FsmState::PrimaryMoving:
        if (viewpoint_ &&
            (in.pose_P.position - *viewpoint_).norm() < in.map->resolution()) {
          next_guide_time_ = in.t;
          transition(in.t, FsmState::SecondaryMoving, "viewpoint_reached");
          emit_guide(in, out);
        }
        break;

      case FsmState::SecondaryMoving:
        if ((in.pose_S_est.position - goal_->position).norm() < in.map->resolution()) {
          transition(in.t, FsmState::GoalReached, "goal_reached");
          ++goals_done_;
          break;
        }
        if (in.t + 1e-9 >= next_guide_time_) {
          emit_guide(in, out);
          next_guide_time_ += 1.0 / params_.guide_rate;
        }
        break;

      case FsmState::GoalReached:
        if (cfg_.auto_increment && goals_.empty() && goals_done_ < cfg_.max_goals) {
          Pose next = in.pose_S_est;
          next.position = next.position + cfg_.increment;
          goals_.push_back(next);
        }
        if (!goals_.empty()) {
          goal_ = goals_.front();
          goals_.pop_front();
          next_plan_time_ = in.t;
          transition(in.t, FsmState::Planning, "next_goal");
        }
        break;

      case FsmState::Failure:
        if (!goals_.empty()) transition(in.t, FsmState::Idle, "new_goal_after_failure");
        break;
    }

    out.state = state_;
    return out;
  }

 private:
  void emit_guide(const FsmInputs& in, FsmOutputs& out) {
    if (!path_S_ || path_S_->empty() || !in.T_SL) return;
    const Path pruned_S = guide_step(*path_S_, *in.T_SL, params_.delta);
    // the remaining path is what gets saved for the next guiding step
    const std::size_t removed = path_S_->size() - pruned_S.size();
    if (removed > 0)
      path_S_ = Path(std::vector<Pose>(path_S_->poses.begin() + removed, path_S_->poses.end()));
    // an all-visited path means the secondary is converging on its final
    // reference; there is nothing left to transmit
    if (pruned_S.empty()) return;
    out.secondary_path_S = pruned_S;
    trace_.push_back({in.t, to_string(state_), "guide"});
  }

  void transition(double t, FsmState s, const std::string& event) {
    state_ = s;
    trace_.push_back({t, to_string(s), event});
  }

  GuidanceParams params_;
  FsmConfig cfg_;
  FsmState state_ = FsmState::Idle;
  std::deque<Pose> goals_;
  std::optional<Pose> goal_;
  std::optional<Path> path_S_;
  std::optional<Vec3> viewpoint_;
  double next_guide_time_ = 0.0;
  double next_plan_time_ = 0.0;
  double last_t_ = 0.0;
  int goals_done_ = 0;
  bool capture_debug_ = false;
  ViewpointDebug debug_;
  std::vector<TraceRow> trace_;
};

}  // namespace coguide
