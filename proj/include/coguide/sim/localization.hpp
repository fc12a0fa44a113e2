// Localization error models: the lidar-based relative localization is a
// calibrated noise source around the true relative transform (the paper
// specifies only its output quality), and the secondary's visual-inertial
// odometry is a random-walk drift on top of true motion.
#pragma once

#include <cmath>

#include "coguide/frames.hpp"
#include "coguide/sim/rng.hpp"

namespace coguide::sim {

enum class LocalizationMode { GroundTruth, Noisy };

struct LocalizationModel {
  LocalizationMode mode = LocalizationMode::GroundTruth;
  double rel_mae = 0.10;        // mean 3D error norm of the relative fix [m]
  double rel_yaw_sigma = 0.02;  // relative yaw noise [rad]
  double rel_update_period = 1.0;  // fused-estimate error correlation window [s]
  double vio_pos_drift = 0.05;  // random-walk intensity [m / sqrt(s)]
  double vio_yaw_drift = 0.005; // [rad / sqrt(s)]

  /// Per-axis sigma such that E||N(0, s^2 I_3)|| equals rel_mae
  /// (chi distribution, k = 3: mean = sigma * sqrt(8/pi)).
  double rel_sigma() const { return rel_mae / 1.5957691216057308; }
};

/// Sample a noisy relative transform around the truth. Ground-truth mode
/// (or rel_mae == 0 with zero yaw noise) returns the input unchanged.
inline Transform4DOF relative_loc_sample(const Transform4DOF& true_T,
                                         const LocalizationModel& model, Rng& rng) {
  if (model.mode == LocalizationMode::GroundTruth) return true_T;
  const double s = model.rel_sigma();
  const Vec3 dt{rng.normal(0.0, s), rng.normal(0.0, s), rng.normal(0.0, s)};
  const double dyaw = rng.normal(0.0, model.rel_yaw_sigma);
  return Transform4DOF(true_T.translation + dt, true_T.yaw + dyaw, true_T.from, true_T.to);
}

/// Accumulated VIO drift: the estimate equals truth plus this random walk.
struct VioState {
  Vec3 pos_error;
  double yaw_error = 0.0;
};

/// Advance the drift by one step of duration dt; the pose estimate is
/// truth + error. Zero drift coefficients keep the estimate exact.
inline void vio_step(VioState& state, const LocalizationModel& model, double dt, Rng& rng) {
  detail::require(dt > 0.0, "vio_step: dt must be > 0");
  if (model.mode == LocalizationMode::GroundTruth) return;
  const double sp = model.vio_pos_drift * std::sqrt(dt);
  const double sy = model.vio_yaw_drift * std::sqrt(dt);
  state.pos_error = state.pos_error + Vec3{rng.normal(0.0, sp), rng.normal(0.0, sp),
                                           rng.normal(0.0, sp)};
  state.yaw_error = state.yaw_error + rng.normal(0.0, sy);
}

}  // namespace coguide::sim
