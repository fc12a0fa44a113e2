// Named gravity-aligned reference frames, poses, paths, and the 4-DOF
// (x, y, z, yaw) rigid transforms that map between them.
//
// All frames share the gravity direction, so a frame-to-frame transform is a
// translation plus a yaw rotation. Transforms are checked at every operation:
// applying a transform to data tagged with the wrong frame throws.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "coguide/core.hpp"

namespace coguide {

/// Identifier of a gravity-aligned reference frame. The standard frames are
/// W (world), L (primary local), V (secondary local), P (primary body),
/// S (secondary body); scenario-defined labels are also allowed.
struct FrameId {
  std::string name;

  FrameId() = default;
  explicit FrameId(std::string n) : name(std::move(n)) {}

  bool operator==(const FrameId& o) const { return name == o.name; }
  bool operator!=(const FrameId& o) const { return name != o.name; }

  static FrameId W() { return FrameId{"W"}; }
  static FrameId L() { return FrameId{"L"}; }
  static FrameId V() { return FrameId{"V"}; }
  static FrameId P() { return FrameId{"P"}; }
  static FrameId S() { return FrameId{"S"}; }
};

/// Position plus heading in a named frame. Heading is normalized to [-pi, pi).
struct Pose {
  Vec3 position;
  double heading = 0.0;
  FrameId frame;

  Pose() = default;
  Pose(const Vec3& p, double h, FrameId f)
      : position(p), heading(wrap_angle(h)), frame(std::move(f)) {}
};

/// Ordered pose sequence; all poses share one frame.
struct Path {
  std::vector<Pose> poses;

  Path() = default;
  explicit Path(std::vector<Pose> p) : poses(std::move(p)) {
    for (std::size_t i = 1; i < poses.size(); ++i)
      detail::require(poses[i].frame == poses[0].frame, "Path poses must share one frame");
  }

  bool empty() const { return poses.empty(); }
  std::size_t size() const { return poses.size(); }
  const FrameId& frame() const {
    detail::require(!poses.empty(), "frame() of empty path");
    return poses.front().frame;
  }
};

/// Rigid transform between two gravity-aligned frames: rotation about z by
/// `yaw`, then translation. Maps data expressed in `from` into `to`.
struct Transform4DOF {
  Vec3 translation;
  double yaw = 0.0;
  FrameId from;
  FrameId to;

  Transform4DOF() = default;
  Transform4DOF(const Vec3& t, double y, FrameId from_, FrameId to_)
      : translation(t), yaw(wrap_angle(y)), from(std::move(from_)), to(std::move(to_)) {}

  static Transform4DOF identity(const FrameId& f) { return {Vec3{}, 0.0, f, f}; }

  Vec3 apply(const Vec3& p) const { return rotate_z(p, yaw) + translation; }

  Pose apply(const Pose& p) const {
    detail::require(p.frame == from, "apply: pose frame does not match transform source");
    return Pose(apply(p.position), wrap_angle(p.heading + yaw), to);
  }
};

/// a ∘ b: first apply b, then a. Requires a.from == b.to.
inline Transform4DOF compose(const Transform4DOF& a, const Transform4DOF& b) {
  detail::require(a.from == b.to, "compose: frame chain mismatch");
  return Transform4DOF(a.apply(b.translation), wrap_angle(a.yaw + b.yaw), b.from, a.to);
}

inline Transform4DOF invert(const Transform4DOF& t) {
  const double inv_yaw = wrap_angle(-t.yaw);
  return Transform4DOF(rotate_z(t.translation * -1.0, inv_yaw), inv_yaw, t.to, t.from);
}

/// Transform every pose of a path. Requires p.frame == t.from.
inline Path apply_path(const Transform4DOF& t, const Path& p) {
  std::vector<Pose> out;
  out.reserve(p.poses.size());
  for (const Pose& pose : p.poses) out.push_back(t.apply(pose));
  return Path(std::move(out));
}

/// Transform describing a pose: maps the pose's body frame into its frame.
inline Transform4DOF pose_to_transform(const Pose& pose, const FrameId& body) {
  return Transform4DOF(pose.position, pose.heading, body, pose.frame);
}

}  // namespace coguide
