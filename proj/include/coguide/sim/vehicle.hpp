// Kinematic waypoint follower: constant-speed pursuit of the active path,
// waypoints consumed within 0.05 m, heading slew limited to pi rad/s.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "coguide/frames.hpp"

namespace coguide::sim {

struct UavState {
  Pose pose;
  std::vector<Pose> active_path;  // remaining waypoints, front is next
  static constexpr double kWaypointTolerance = 0.05;

  bool hovering() const { return active_path.empty(); }

  void set_path(const Path& p) { active_path = p.poses; }
  void clear_path() { active_path.clear(); }
};

/// Advance one step of duration dt at the given speed. An empty path hovers;
/// position error to the commanded polyline stays below speed * dt.
inline void uav_step(UavState& state, double speed, double dt) {
  detail::require(speed > 0.0 && dt > 0.0, "uav_step: speed and dt must be > 0");
  double budget = speed * dt;
  while (!state.active_path.empty() && budget > 0.0) {
    const Vec3 to_wp = state.active_path.front().position - state.pose.position;
    const double dist = to_wp.norm();
    if (dist <= budget) {
      state.pose.position = state.active_path.front().position;
      budget -= dist;
      state.active_path.erase(state.active_path.begin());
      continue;
    }
    state.pose.position = state.pose.position + to_wp * (budget / dist);
    budget = 0.0;
    if (dist - speed * dt <= UavState::kWaypointTolerance)
      state.active_path.erase(state.active_path.begin());
  }

  const double target_heading =
      state.active_path.empty() ? state.pose.heading : state.active_path.front().heading;
  const double err = wrap_angle(target_heading - state.pose.heading);
  const double max_step = M_PI * dt;
  state.pose.heading = wrap_angle(state.pose.heading + std::clamp(err, -max_step, max_step));
}

}  // namespace coguide::sim
