// Analytic spinning-lidar model: equiangular beams over 360 deg azimuth and
// a symmetric vertical fan, downsampled like the real mapping pipeline.
#pragma once

#include <cmath>
#include <vector>

#include "coguide/core.hpp"
#include "coguide/frames.hpp"
#include "coguide/sim/world.hpp"

namespace coguide::sim {

struct LidarSpec {
  int h_beams = 1024;
  int v_beams = 128;
  double v_fov = M_PI / 2.0;  // full vertical field of view
  double rate = 10.0;         // Hz
  double max_range = 20.0;    // m
  int h_downsample = 4;
  int v_downsample = 4;

  int h_used() const { return h_beams / h_downsample; }
  int v_used() const { return v_beams / v_downsample; }
};

struct LidarScan {
  std::vector<Vec3> hits;    // world-frame first intersections
  std::vector<Vec3> misses;  // endpoints of full-length rays (no return)
};

/// Cast the downsampled beam pattern from `pose` (sensor yaw follows the
/// vehicle heading; frames are gravity-aligned). Hits are analytic first
/// intersections with the world geometry.
inline LidarScan simulate_lidar_full(const World& world, const Pose& pose,
                                     const LidarSpec& spec) {
  detail::require(world.bounds.contains(pose.position), "simulate_lidar: pose outside bounds");
  LidarScan scan;
  const int nh = spec.h_used();
  const int nv = spec.v_used();
  scan.hits.reserve(static_cast<std::size_t>(nh) * nv);
  for (int vi = 0; vi < nv; ++vi) {
    const double elev = nv > 1 ? -spec.v_fov / 2.0 + spec.v_fov * vi / (nv - 1) : 0.0;
    const double ce = std::cos(elev), se = std::sin(elev);
    for (int hi = 0; hi < nh; ++hi) {
      const double az = pose.heading + 2.0 * M_PI * hi / nh;
      const Vec3 dir{ce * std::cos(az), ce * std::sin(az), se};
      const auto t = world.raycast(pose.position, dir, spec.max_range);
      if (t) {
        scan.hits.push_back(pose.position + dir * *t);
      } else {
        scan.misses.push_back(pose.position + dir * spec.max_range);
      }
    }
  }
  return scan;
}

/// Spec-shaped variant: hit points only (max-range carving is the map's job).
inline std::vector<Vec3> simulate_lidar(const World& world, const Pose& pose,
                                        const LidarSpec& spec) {
  return simulate_lidar_full(world, pose, spec).hits;
}

}  // namespace coguide::sim
