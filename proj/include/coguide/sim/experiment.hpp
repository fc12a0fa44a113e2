// Experiment runner reproducing the simulation studies: the two-room gap
// sweep over planner safe distances and framework configurations, and the
// forest auto-increment mission. Deterministic per (config, seed); runs are
// independent and may execute on a small thread pool, with results written
// back by index so reports are byte-identical regardless of thread count.
#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "coguide/sim/simulation.hpp"

namespace coguide::sim {

struct ConfigSpec {
  std::string name;
  LocalizationMode loc = LocalizationMode::GroundTruth;
  MapSource map_source = MapSource::PrimaryBuilt;
  bool periodic_guiding = true;
  bool single_primary = false;
};

/// The configurations compared in the gap study, strongest first.
inline std::vector<ConfigSpec> default_gap_configs() {
  return {
      {"coop_gt", LocalizationMode::GroundTruth, MapSource::GroundTruth, true, false},
      {"coop_full", LocalizationMode::Noisy, MapSource::PrimaryBuilt, true, false},
      {"coop_full_once", LocalizationMode::Noisy, MapSource::PrimaryBuilt, false, false},
      {"single_primary", LocalizationMode::GroundTruth, MapSource::PrimaryBuilt, true, true},
  };
}

/// Secondary-carried-lidar comparison configuration (mapping-error study).
inline ConfigSpec suav_map_config() {
  return {"coop_gt_suav_map", LocalizationMode::GroundTruth, MapSource::SecondaryBuilt, true,
          false};
}

struct GapExperimentSpec {
  std::vector<ConfigSpec> configs = default_gap_configs();
  std::vector<double> ds_values = {0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60};
  int runs = 10;
  std::uint64_t seed = 1;
  double resolution = 0.1;
  double duration_cap = 150.0;
  double altitude = 1.6;
  SimParams base;  // speeds, rates, noise magnitudes
};

struct GapRunRecord {
  std::string config;
  double d_S = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  RunOutcome outcome = RunOutcome::Timeout;
  double sim_time = 0.0;
  int goals_reached = 0;
  double min_clearance_S = kInfinity;
  std::uint64_t path_bytes = 0;
  std::uint64_t odometry_bytes = 0;
};

struct GapReport {
  GapExperimentSpec spec;
  std::vector<GapRunRecord> records;                 // ordered (config, d_S, run)
  std::vector<std::uint32_t> path_message_sizes;     // pooled across runs
};

namespace experiment_detail {

inline std::uint64_t run_seed(std::uint64_t base, std::size_t config_i, std::size_t ds_i,
                              int run) {
  return splitmix64(base + 0x9E37u * (config_i + 1) + 0x79B9u * (ds_i + 1) +
                    static_cast<std::uint64_t>(run));
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename Job>
void parallel_for(std::size_t n, int threads, Job&& job) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      job(i);
    }
  };
  std::vector<std::thread> pool;
  const int use = std::min<int>(threads, static_cast<int>(n));
  pool.reserve(use);
  for (int i = 0; i < use; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace experiment_detail

/// One gap run: randomized starts and map-grid alignment, a goal beyond the
/// gap and the return goal on the start side. Success requires both goals
/// without any collision.
inline RunResult run_gap_once(const ConfigSpec& config, double d_S, std::uint64_t seed,
                              const GapExperimentSpec& spec) {
  const double res = spec.resolution;
  World world = make_gap_world(d_S, res);
  Rng init(seed, 0);

  const double alt = spec.altitude;
  const Pose sec_start({-4.5 - init.uniform(0.0, 1.0), init.uniform(-1.5, 1.5), alt},
                       0.0, FrameId::L());
  Pose pri_start({sec_start.position.x - 1.3 - init.uniform(0.0, 0.8),
                  std::clamp(sec_start.position.y + init.uniform(-1.2, 1.2), -2.8, 2.8), alt},
                 0.0, FrameId::L());

  const Vec3 jitter{init.uniform(0.0, res), init.uniform(0.0, res), init.uniform(0.0, res)};
  OccupancyMap map(res, Vec3{0, 0, 1.3} + jitter, Vec3{22.0, 10.0, 3.4});

  SimParams params = spec.base;
  params.guidance.d_S = d_S;
  params.loc.mode = config.loc;
  params.map_source = config.map_source;
  params.periodic_guiding = config.periodic_guiding;
  params.single_primary = config.single_primary;
  params.duration_cap = spec.duration_cap;

  // out-goal just past the gap: the return viewpoint has to see the first
  // return waypoint through the slot, which requires the secondary to park
  // near the gap (the paper's missions stage goals the same way)
  const Pose goal_out({0.9 + init.uniform(0.0, 0.4), init.uniform(-0.8, 0.8), alt}, 0.0,
                      FrameId::L());
  const Pose goal_back = sec_start;

  Simulation sim(std::move(world), std::move(map), params, seed);
  if (config.single_primary) {
    sim.set_primary(sec_start);
    sim.push_single_goal(goal_out);
    sim.push_single_goal(goal_back);
  } else {
    sim.set_primary(pri_start);
    sim.set_secondary(sec_start);
    sim.push_goal(goal_out);
    sim.push_goal(goal_back);
  }
  return sim.run();
}

inline GapReport run_gap_experiment(const GapExperimentSpec& spec, int threads = 1) {
  using namespace experiment_detail;
  GapReport report;
  report.spec = spec;
  struct Job {
    std::size_t config_i, ds_i;
    int run;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < spec.configs.size(); ++c)
    for (std::size_t d = 0; d < spec.ds_values.size(); ++d)
      for (int r = 0; r < spec.runs; ++r) jobs.push_back({c, d, r});

  std::vector<GapRunRecord> records(jobs.size());
  std::vector<std::vector<std::uint32_t>> sizes(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const ConfigSpec& cfg = spec.configs[job.config_i];
    const double d_S = spec.ds_values[job.ds_i];
    const std::uint64_t seed = run_seed(spec.seed, job.config_i, job.ds_i, job.run);
    const RunResult r = run_gap_once(cfg, d_S, seed, spec);
    GapRunRecord rec;
    rec.config = cfg.name;
    rec.d_S = d_S;
    rec.run = job.run;
    rec.seed = seed;
    rec.outcome = r.outcome;
    rec.sim_time = r.sim_time;
    rec.goals_reached = r.goals_reached;
    rec.min_clearance_S = r.min_clearance_S;
    rec.path_bytes = r.path_bytes;
    rec.odometry_bytes = r.odometry_bytes;
    records[i] = rec;
    sizes[i] = r.path_message_sizes;
  });
  report.records = std::move(records);
  for (auto& s : sizes)
    report.path_message_sizes.insert(report.path_message_sizes.end(), s.begin(), s.end());
  return report;
}

/// successes per (config name, d_S)
inline std::map<std::pair<std::string, double>, int> gap_successes(const GapReport& report) {
  std::map<std::pair<std::string, double>, int> out;
  for (const ConfigSpec& c : report.spec.configs)
    for (double d : report.spec.ds_values) out[{c.name, d}] = 0;
  for (const GapRunRecord& r : report.records)
    if (r.outcome == RunOutcome::Success) out[{r.config, r.d_S}]++;
  return out;
}

inline void write_gap_results_csv(const GapReport& report, std::ostream& os) {
  using experiment_detail::fmt;
  os << "config,d_S,run,seed,outcome,sim_time,goals_reached,min_clearance_S,path_bytes,"
        "odometry_bytes\n";
  for (const GapRunRecord& r : report.records) {
    os << r.config << ',' << fmt(r.d_S) << ',' << r.run << ',' << r.seed << ','
       << to_string(r.outcome) << ',' << fmt(r.sim_time) << ',' << r.goals_reached << ','
       << fmt(r.min_clearance_S == kInfinity ? -1.0 : r.min_clearance_S) << ',' << r.path_bytes
       << ',' << r.odometry_bytes << '\n';
  }
}

inline void write_gap_summary_csv(const GapReport& report, std::ostream& os) {
  using experiment_detail::fmt;
  const auto successes = gap_successes(report);
  os << "config,d_S,successes,runs\n";
  for (const ConfigSpec& c : report.spec.configs)
    for (double d : report.spec.ds_values)
      os << c.name << ',' << fmt(d) << ',' << successes.at({c.name, d}) << ','
         << report.spec.runs << '\n';
}

/// Path-size histogram CSV (message-size distribution over all runs).
inline void write_path_size_histogram_csv(const std::vector<std::uint32_t>& sizes,
                                          std::ostream& os) {
  std::map<std::uint32_t, std::uint64_t> hist;
  for (std::uint32_t s : sizes) hist[s]++;
  os << "message_bytes,count\n";
  for (const auto& [size, count] : hist) os << size << ',' << count << '\n';
}

/// Channel bandwidth summary: bytes * rate, exactly.
struct BandwidthReport {
  double odometry_rate_hz = 2.0;
  double path_rate_hz = 5.0;
  std::uint32_t odometry_bytes = static_cast<std::uint32_t>(message_bytes(1));
  std::uint32_t path_min_bytes = 0;
  std::uint32_t path_max_bytes = 0;
  double odometry_kbps() const { return odometry_bytes * odometry_rate_hz / 1000.0; }
  double path_min_kbps() const { return path_min_bytes * path_rate_hz / 1000.0; }
  double path_max_kbps() const { return path_max_bytes * path_rate_hz / 1000.0; }
};

inline BandwidthReport make_bandwidth_report(const std::vector<std::uint32_t>& path_sizes) {
  BandwidthReport b;
  for (std::uint32_t s : path_sizes) {
    if (b.path_min_bytes == 0 || s < b.path_min_bytes) b.path_min_bytes = s;
    b.path_max_bytes = std::max(b.path_max_bytes, s);
  }
  return b;
}

inline void write_bandwidth_csv(const BandwidthReport& b, std::ostream& os) {
  using experiment_detail::fmt;
  os << "channel,rate_hz,min_bytes,max_bytes,min_kbps,max_kbps\n";
  os << "odometry," << fmt(b.odometry_rate_hz) << ',' << b.odometry_bytes << ','
     << b.odometry_bytes << ',' << fmt(b.odometry_kbps()) << ',' << fmt(b.odometry_kbps())
     << '\n';
  os << "path," << fmt(b.path_rate_hz) << ',' << b.path_min_bytes << ',' << b.path_max_bytes
     << ',' << fmt(b.path_min_kbps()) << ',' << fmt(b.path_max_kbps()) << '\n';
}

// ---------------------------------------------------------------------------
// Forest missions
// ---------------------------------------------------------------------------

struct ForestExperimentSpec {
  int runs = 50;
  std::uint64_t seed = 1;
  int goals = 1;        // +4 m increments to complete
  double density = 0.05;
  double radius_lo = 0.10, radius_hi = 0.30;
  double resolution = 0.1;
  double duration_cap = 120.0;
  double altitude = 1.5;
  SimParams base;
};

struct ForestRunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  RunOutcome outcome = RunOutcome::Timeout;
  double sim_time = 0.0;
  int goals_reached = 0;
  double min_clearance_S = kInfinity;
};

struct ForestReport {
  ForestExperimentSpec spec;
  std::vector<ForestRunRecord> records;
  std::vector<std::uint32_t> path_message_sizes;
};

inline RunResult run_forest_once(std::uint64_t seed, const ForestExperimentSpec& spec,
                                 std::vector<Vec3>* traj_P = nullptr,
                                 std::vector<Vec3>* traj_S = nullptr, World* world_out = nullptr) {
  World world = make_forest_world(seed, spec.density, spec.radius_lo, spec.radius_hi);
  if (world_out) *world_out = world;
  Rng init(seed, 0);
  const double alt = spec.altitude;
  const Pose sec_start({0.0, 0.0, alt}, 0.0, FrameId::L());
  // the primary starts behind the secondary at a collision-free spot
  Pose pri_start({-2.2, 0.0, alt}, 0.0, FrameId::L());
  for (int tries = 0; tries < 64; ++tries) {
    pri_start.position = {-2.2 - init.uniform(0.0, 0.6), init.uniform(-1.0, 1.0), alt};
    if (world.distance(pri_start.position) > 0.6) break;
  }

  const Vec3 jitter{init.uniform(0.0, spec.resolution), init.uniform(0.0, spec.resolution),
                    init.uniform(0.0, spec.resolution)};
  OccupancyMap map(spec.resolution, Vec3{0, 0, 3.6} + jitter, Vec3{24.0, 24.0, 8.0});

  SimParams params = spec.base;
  params.duration_cap = spec.duration_cap;

  FsmConfig fsm_cfg;
  fsm_cfg.auto_increment = true;
  fsm_cfg.max_goals = spec.goals;

  Simulation sim(std::move(world), std::move(map), params, seed, fsm_cfg);
  sim.set_primary(pri_start);
  sim.set_secondary(sec_start);
  sim.push_goal(Pose(sec_start.position + Vec3{4.0, 0.0, 0.0}, 0.0, FrameId::L()));
  RunResult r = sim.run();
  if (traj_P) *traj_P = r.traj_P;
  if (traj_S) *traj_S = r.traj_S;
  return r;
}

inline ForestReport run_forest_experiment(const ForestExperimentSpec& spec, int threads = 1) {
  using namespace experiment_detail;
  ForestReport report;
  report.spec = spec;
  std::vector<ForestRunRecord> records(spec.runs);
  std::vector<std::vector<std::uint32_t>> sizes(spec.runs);
  parallel_for(spec.runs, threads, [&](std::size_t i) {
    const std::uint64_t seed = run_seed(spec.seed, 0, 0, static_cast<int>(i));
    const RunResult r = run_forest_once(seed, spec);
    ForestRunRecord rec;
    rec.run = static_cast<int>(i);
    rec.seed = seed;
    rec.outcome = r.outcome;
    rec.sim_time = r.sim_time;
    rec.goals_reached = r.goals_reached;
    rec.min_clearance_S = r.min_clearance_S;
    records[i] = rec;
    sizes[i] = r.path_message_sizes;
  });
  report.records = std::move(records);
  for (auto& s : sizes)
    report.path_message_sizes.insert(report.path_message_sizes.end(), s.begin(), s.end());
  return report;
}

inline void write_forest_results_csv(const ForestReport& report, std::ostream& os) {
  using experiment_detail::fmt;
  os << "run,seed,outcome,sim_time,goals_reached,min_clearance_S\n";
  for (const ForestRunRecord& r : report.records)
    os << r.run << ',' << r.seed << ',' << to_string(r.outcome) << ',' << fmt(r.sim_time) << ','
       << r.goals_reached << ',' << fmt(r.min_clearance_S == kInfinity ? -1.0 : r.min_clearance_S)
       << '\n';
}

}  // namespace coguide::sim
