// Closed-loop cooperative guidance simulation: the primary maps the world
// from simulated scans, runs the guidance FSM, and guides the secondary,
// which follows relative paths under VIO drift. Single-threaded and fully
// deterministic per seed.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coguide/guidance.hpp"
#include "coguide/sim/codec.hpp"
#include "coguide/sim/lidar.hpp"
#include "coguide/sim/localization.hpp"
#include "coguide/sim/rng.hpp"
#include "coguide/sim/vehicle.hpp"
#include "coguide/sim/world.hpp"

namespace coguide::sim {

enum class MapSource { PrimaryBuilt, SecondaryBuilt, GroundTruth };

struct SimParams {
  double dt = 0.05;
  double lidar_period = 0.1;     // 10 Hz mapping and relative localization
  double odometry_period = 0.5;  // 2 Hz secondary -> primary channel
  double uav_speed = 1.0;
  double primary_radius = 0.35;    // half of the 0.7 m airframe
  double secondary_radius = 0.225; // half of the 0.45 m airframe
  double duration_cap = 180.0;     // simulated seconds
  GuidanceParams guidance;
  LidarSpec lidar;
  LocalizationModel loc;
  MapSource map_source = MapSource::PrimaryBuilt;
  bool periodic_guiding = true;
  bool single_primary = false;  // baseline: the lidar vehicle flies alone
};

enum class RunOutcome { Success, Collision, FsmFailure, Timeout };

inline const char* to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::Success: return "success";
    case RunOutcome::Collision: return "collision";
    case RunOutcome::FsmFailure: return "fsm_failure";
    case RunOutcome::Timeout: return "timeout";
  }
  return "?";
}

struct RunResult {
  RunOutcome outcome = RunOutcome::Timeout;
  double sim_time = 0.0;
  int goals_reached = 0;
  double min_clearance_P = kInfinity;  // true surface distance minima
  double min_clearance_S = kInfinity;
  std::uint64_t odometry_bytes = 0;
  std::uint64_t path_bytes = 0;
  std::uint64_t odometry_msgs = 0;
  std::uint64_t path_msgs = 0;
  std::vector<std::uint32_t> path_message_sizes;
  std::vector<TraceRow> trace;
  std::vector<Vec3> traj_P, traj_S;  // sampled true trajectories (2 Hz)
};

class Simulation {
 public:
  Simulation(World world, OccupancyMap map, const SimParams& params, std::uint64_t seed,
             FsmConfig fsm_cfg = {})
      : world_(std::move(world)),
        map_(std::move(map)),
        params_(params),
        fsm_(params.guidance, fsm_cfg),
        rng_loc_(seed, 1),
        rng_vio_(seed, 2) {
    if (params_.map_source == MapSource::GroundTruth) rasterize_world(world_, map_);
  }

  void set_primary(const Pose& pose) { primary_.pose = pose; }
  void set_secondary(const Pose& pose) {
    secondary_true_ = pose;
    belief_.pose = pose;  // VIO frame initialized coincident with L
  }
  void push_goal(const Pose& goal) { fsm_.push_goal(goal); }
  GuidanceFsm& fsm() { return fsm_; }
  const OccupancyMap& map() const { return map_; }
  const Pose& primary_pose() const { return primary_.pose; }
  const Pose& secondary_pose() const { return secondary_true_; }

  /// Run until all pushed goals are reached, the FSM fails, a vehicle
  /// collides, or the duration cap expires.
  RunResult run() {
    return params_.single_primary ? run_single() : run_cooperative();
  }

 private:
  RunResult run_cooperative() {
    RunResult out;
    const FrameId L = FrameId::L(), S = FrameId::S();
    double t = 0.0;
    double next_scan = 0.0, next_odo = 0.0, next_traj = 0.0, next_fix = 0.0;
    std::uint32_t seq_path = 0, seq_odo = 0;
    // relative-localization error: a fused estimate drifts slowly, so the
    // sampled error is held over the model's correlation window and applied
    // to the current true transform
    Vec3 fix_err;
    double fix_yaw_err = 0.0;

    const int max_ticks = static_cast<int>(params_.duration_cap / params_.dt) + 1;
    for (int tick = 0; tick < max_ticks; ++tick, t += params_.dt) {
      if (t + 1e-9 >= next_scan) {
        next_scan += params_.lidar_period;
        if (params_.map_source != MapSource::GroundTruth) {
          const Pose& sensor = params_.map_source == MapSource::PrimaryBuilt
                                   ? primary_.pose
                                   : secondary_true_;
          if (map_.contains(sensor.position)) {
            const LidarScan scan = simulate_lidar_full(world_, sensor, params_.lidar);
            map_.integrate_scan(sensor.position, scan.hits, params_.lidar.max_range,
                                scan.misses);
          }
        }
      }
      if (t + 1e-9 >= next_fix) {
        next_fix += params_.loc.rel_update_period;
        const Transform4DOF truth = current_true_t_sl();
        const Transform4DOF sampled = relative_loc_sample(truth, params_.loc, rng_loc_);
        fix_err = sampled.translation - truth.translation;
        fix_yaw_err = sampled.yaw - truth.yaw;
      }
      const Transform4DOF t_sl = [&] {
        Transform4DOF truth = current_true_t_sl();
        return Transform4DOF(truth.translation + fix_err, truth.yaw + fix_yaw_err, truth.from,
                             truth.to);
      }();

      // odometry channel accounting (VIO pose at 2 Hz)
      if (t + 1e-9 >= next_odo) {
        next_odo += params_.odometry_period;
        out.odometry_bytes += encode_odometry(belief_.pose, seq_odo++).size();
        ++out.odometry_msgs;
      }

      // guidance FSM
      FsmInputs in;
      in.t = t;
      in.map = &map_;
      in.pose_P = primary_.pose;
      const Transform4DOF t_ls = invert(t_sl);
      in.pose_S_est = Pose(t_ls.translation, t_ls.yaw, L);
      in.T_SL = t_sl;
      in.primary_hovering = primary_.hovering();
      in.secondary_hovering = belief_.hovering();
      const FsmOutputs cmd = fsm_.tick(in);

      if (cmd.state != FsmState::SecondaryMoving) phase_guides_ = 0;
      if (cmd.primary_path) primary_.set_path(*cmd.primary_path);
      if (cmd.secondary_path_S && (params_.periodic_guiding || phase_guides_ == 0)) {
        ++phase_guides_;
        const auto bytes = encode_path(*cmd.secondary_path_S, seq_path++);
        out.path_bytes += bytes.size();
        ++out.path_msgs;
        out.path_message_sizes.push_back(static_cast<std::uint32_t>(bytes.size()));
        // the secondary anchors the relative path at its current VIO pose
        const Transform4DOF anchor(belief_.pose.position, belief_.pose.heading, S, FrameId::V());
        belief_.set_path(apply_path(anchor, *cmd.secondary_path_S));
      }

      // vehicle kinematics; the secondary flies its VIO-frame plan while the
      // truth deviates by the accumulated drift
      uav_step(primary_, params_.uav_speed, params_.dt);
      const Vec3 old_belief = belief_.pose.position;
      const double old_heading = belief_.pose.heading;
      uav_step(belief_, params_.uav_speed, params_.dt);
      secondary_true_.position =
          secondary_true_.position + (belief_.pose.position - old_belief);
      secondary_true_.heading =
          wrap_angle(secondary_true_.heading + wrap_angle(belief_.pose.heading - old_heading));
      vio_step_and_rebase();

      // safety monitors on true geometry
      out.min_clearance_P = std::min(out.min_clearance_P, world_.distance(primary_.pose.position));
      out.min_clearance_S =
          std::min(out.min_clearance_S, world_.distance(secondary_true_.position));
      if (out.min_clearance_S < params_.secondary_radius ||
          out.min_clearance_P < params_.primary_radius) {
        out.outcome = RunOutcome::Collision;
        out.sim_time = t;
        finish(out);
        return out;
      }

      if (t + 1e-9 >= next_traj) {
        next_traj += 0.5;
        out.traj_P.push_back(primary_.pose.position);
        out.traj_S.push_back(secondary_true_.position);
      }

      if (cmd.state == FsmState::Failure) {
        out.outcome = RunOutcome::FsmFailure;
        out.sim_time = t;
        finish(out);
        return out;
      }
      if (fsm_.mission_complete()) {
        out.outcome = RunOutcome::Success;
        out.sim_time = t;
        finish(out);
        return out;
      }
    }
    out.outcome = RunOutcome::Timeout;
    out.sim_time = params_.duration_cap;
    finish(out);
    return out;
  }

  /// Baseline: the lidar-carrying vehicle plans for itself with d_P and
  /// flies the goal sequence alone.
  RunResult run_single() {
    RunResult out;
    double t = 0.0, next_scan = 0.0, next_traj = 0.0;
    std::vector<Pose> goals = pending_goals_;
    std::size_t goal_i = 0;
    bool planned = false;

    const int max_ticks = static_cast<int>(params_.duration_cap / params_.dt) + 1;
    for (int tick = 0; tick < max_ticks; ++tick, t += params_.dt) {
      if (t + 1e-9 >= next_scan) {
        next_scan += params_.lidar_period;
        if (params_.map_source != MapSource::GroundTruth &&
            map_.contains(primary_.pose.position)) {
          const LidarScan scan = simulate_lidar_full(world_, primary_.pose, params_.lidar);
          map_.integrate_scan(primary_.pose.position, scan.hits, params_.lidar.max_range,
                              scan.misses);
        }
      }
      if (goal_i >= goals.size()) {
        out.outcome = RunOutcome::Success;
        out.sim_time = t;
        out.goals_reached = static_cast<int>(goals.size());
        return out;
      }
      if (primary_.hovering()) {
        const Pose& goal = goals[goal_i];
        if ((primary_.pose.position - goal.position).norm() < map_.resolution()) {
          ++goal_i;
          planned = false;
          continue;
        }
        if (!planned) {
          planned = true;
          PlanRequest req;
          req.map = &map_;
          req.start = primary_.pose;
          req.goal = goal;
          req.d_min = params_.guidance.d_P;
          const PlanResult r = find_path(req);
          if (!r.path) {
            out.outcome = RunOutcome::FsmFailure;
            out.sim_time = t;
            return out;
          }
          primary_.set_path(*r.path);
        } else {
          // path exhausted away from the goal: replan next tick
          planned = false;
        }
      }
      uav_step(primary_, params_.uav_speed, params_.dt);
      out.min_clearance_P = std::min(out.min_clearance_P, world_.distance(primary_.pose.position));
      if (out.min_clearance_P < params_.primary_radius) {
        out.outcome = RunOutcome::Collision;
        out.sim_time = t;
        return out;
      }
      if (t + 1e-9 >= next_traj) {
        next_traj += 0.5;
        out.traj_P.push_back(primary_.pose.position);
      }
    }
    out.outcome = RunOutcome::Timeout;
    out.sim_time = params_.duration_cap;
    return out;
  }

 public:
  /// Single-primary baseline keeps its goal list outside the FSM.
  void push_single_goal(const Pose& goal) { pending_goals_.push_back(goal); }

 private:
  Transform4DOF current_true_t_sl() const {
    return invert(Transform4DOF(secondary_true_.position, secondary_true_.heading, FrameId::S(),
                                FrameId::L()));
  }

  void vio_step_and_rebase() {
    if (params_.loc.mode != LocalizationMode::GroundTruth)
      vio_step(drift_, params_.loc, params_.dt, rng_vio_);
    belief_.pose.position = secondary_true_.position + drift_.pos_error;
    belief_.pose.heading = wrap_angle(secondary_true_.heading + drift_.yaw_error);
  }

  void finish(RunResult& out) {
    out.trace = fsm_.trace();
    int reached = 0;
    for (const TraceRow& row : out.trace)
      if (row.event == "goal_reached" || row.event == "goal_already_reached") ++reached;
    out.goals_reached = reached;
  }

  World world_;
  OccupancyMap map_;
  SimParams params_;
  GuidanceFsm fsm_;
  UavState primary_;      // true pose, path in L
  Pose secondary_true_;
  UavState belief_;       // VIO pose estimate, path in V
  VioState drift_;
  Rng rng_loc_;
  Rng rng_vio_;
  std::vector<Pose> pending_goals_;
  int phase_guides_ = 0;
};

}  // namespace coguide::sim
