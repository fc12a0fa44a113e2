// Command-line front end: grid planning on voxmap files, guiding-viewpoint
// queries with SVG region dumps, and the gap / forest simulation studies.
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coguide/guidance.hpp"
#include "coguide/planner.hpp"
#include "coguide/sim/experiment.hpp"
#include "coguide/svg.hpp"
#include "coguide/voxel_map.hpp"

using namespace coguide;
using json = nlohmann::json;

namespace {

Vec3 parse_vec3(const std::string& s) {
  Vec3 v;
  char c;
  std::istringstream is(s);
  if (!(is >> v.x >> c >> v.y >> c >> v.z)) throw CLI::ValidationError("expected x,y,z");
  return v;
}

Pose parse_pose(const std::string& s, const FrameId& frame) {
  std::istringstream is(s);
  double x, y, z, h = 0.0;
  char c;
  if (!(is >> x >> c >> y >> c >> z)) throw CLI::ValidationError("expected x,y,z[,heading]");
  is >> c >> h;  // optional heading
  return Pose({x, y, z}, h, frame);
}

OccupancyMap load_map(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("cannot open map file: " + path);
  return OccupancyMap::load(is);
}

Path load_path_csv(const std::string& path, const FrameId& frame) {
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("cannot open path file: " + path);
  std::vector<Pose> poses;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'x' || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, y, z, h;
    char c;
    if (ls >> x >> c >> y >> c >> z >> c >> h) poses.emplace_back(Vec3{x, y, z}, h, frame);
  }
  return Path(std::move(poses));
}

void write_path_csv(const Path& path, std::ostream& os) {
  os << "x,y,z,heading\n";
  char buf[160];
  for (const Pose& p : path.poses) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", p.position.x, p.position.y,
                  p.position.z, p.heading);
    os << buf;
  }
}

void apply_params_json(const json& j, GuidanceParams& g) {
  if (j.contains("w_P")) g.w_P = j["w_P"];
  if (j.contains("h_P")) g.h_P = j["h_P"];
  if (j.contains("w_S")) g.w_S = j["w_S"];
  if (j.contains("h_S")) g.h_S = j["h_S"];
  if (j.contains("d_P")) g.d_P = j["d_P"];
  if (j.contains("d_S")) g.d_S = j["d_S"];
  if (j.contains("n_samples")) g.n_samples = j["n_samples"];
  if (j.contains("d_ray")) g.d_ray = j["d_ray"];
  if (j.contains("d_buffer")) g.d_buffer = j["d_buffer"];
  if (j.contains("delta")) g.delta = j["delta"];
  if (j.contains("guide_rate")) g.guide_rate = j["guide_rate"];
  if (j.contains("replan_rate")) g.replan_rate = j["replan_rate"];
}

sim::ConfigSpec parse_config_spec(const json& j) {
  sim::ConfigSpec c;
  c.name = j.value("name", "config");
  const std::string loc = j.value("localization", "gt");
  c.loc = loc == "full" ? sim::LocalizationMode::Noisy : sim::LocalizationMode::GroundTruth;
  const std::string src = j.value("map_source", "primary");
  c.map_source = src == "ground_truth" ? sim::MapSource::GroundTruth
                 : src == "secondary"  ? sim::MapSource::SecondaryBuilt
                                       : sim::MapSource::PrimaryBuilt;
  const std::string mode = j.value("guiding", "periodic");
  c.periodic_guiding = mode != "once";
  c.single_primary = j.value("baseline", "coop") == std::string("single-primary");
  return c;
}

std::vector<double> parse_sweep(const std::string& s) {
  // "lo:hi:step" or comma list
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    double lo, hi, step;
    char c;
    std::istringstream is(s);
    if (!(is >> lo >> c >> hi >> c >> step) || step <= 0)
      throw CLI::ValidationError("expected lo:hi:step");
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  } else {
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw CLI::ValidationError("empty d_S sweep");
  return out;
}

void dump_viewpoint_svg(const ViewpointDebug& dbg, const Path& path,
                        const std::optional<Vec3>& viewpoint, const Vec3& x_P,
                        const std::string& file) {
  SvgWriter svg;
  for (std::size_t i = 0; i < dbg.visibility.size(); ++i)
    svg.add_multipolygon("V_" + std::to_string(i), dbg.visibility[i], "#4060c040");
  svg.add_multipolygon("B", dbg.buffer, "#e0a03060");
  svg.add_multipolygon("S", dbg.safe, "#30c06050");
  svg.add_multipolygon("I_all", dbg.intersection, "#e0303080");
  std::vector<Vec2> pts;
  for (const Pose& p : path.poses) pts.push_back(p.position.xy());
  svg.add_polyline("path_S", pts, "#c03030", 0.06);
  svg.add_point("x_P", x_P.xy(), "#202020");
  if (viewpoint) svg.add_point("g_P", viewpoint->xy(), "#9020c0");
  std::ofstream os(file);
  svg.write(os);
}

int cmd_plan(const std::string& map_file, const std::string& start_s, const std::string& goal_s,
             double d_min, double unknown_penalty, double timeout, const std::string& out_file) {
  const OccupancyMap map = load_map(map_file);
  PlanRequest req;
  req.map = &map;
  req.start = parse_pose(start_s, FrameId::L());
  req.goal = parse_pose(goal_s, FrameId::L());
  req.d_min = d_min;
  req.unknown_penalty = unknown_penalty;
  req.timeout = timeout;
  const PlanResult r = find_path(req);
  if (!r.path) {
    std::cerr << "no path (expanded " << r.nodes_expanded << " nodes)\n";
    return 1;
  }
  if (out_file.empty() || out_file == "-") {
    write_path_csv(*r.path, std::cout);
  } else {
    std::ofstream os(out_file);
    write_path_csv(*r.path, os);
  }
  std::cerr << "path: " << r.path->size() << " poses, raw cost " << r.raw_cost << ", "
            << r.nodes_expanded << " nodes expanded\n";
  return 0;
}

int cmd_viewpoint(const std::string& map_file, const std::string& path_file,
                  const std::string& primary_s, const std::string& params_file,
                  const std::string& svg_file) {
  const OccupancyMap map = load_map(map_file);
  const Path path = load_path_csv(path_file, FrameId::L());
  const Vec3 x_P = parse_vec3(primary_s);
  GuidanceParams params;
  if (!params_file.empty()) {
    std::ifstream is(params_file);
    if (!is) throw CLI::ValidationError("cannot open params file: " + params_file);
    apply_params_json(json::parse(is), params);
  }
  ViewpointDebug dbg;
  const ViewpointResult r = find_guiding_viewpoint(map, path, x_P, params, &dbg);
  if (!svg_file.empty()) dump_viewpoint_svg(dbg, path, r.point, x_P, svg_file);
  if (!r.point) {
    std::cout << "viewpoint: none\n";
    return 1;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "viewpoint: %.6f %.6f %.6f (covers %d waypoints)\n",
                r.point->x, r.point->y, r.point->z, r.prefix);
  std::cout << buf;
  return 0;
}

void write_file(const std::string& dir, const std::string& name,
                const std::function<void(std::ostream&)>& writer) {
  const std::string path = dir.empty() ? name : dir + "/" + name;
  std::ofstream os(path);
  if (!os) throw CLI::ValidationError("cannot write " + path);
  writer(os);
  std::cerr << "wrote " << path << "\n";
}

int cmd_sim_gap(const std::string& sweep_s, int runs, std::uint64_t seed,
                const std::string& config_file, const std::string& out_dir, int threads) {
  sim::GapExperimentSpec spec;
  spec.ds_values = parse_sweep(sweep_s);
  spec.runs = runs;
  spec.seed = seed;
  if (!config_file.empty()) {
    std::ifstream is(config_file);
    if (!is) throw CLI::ValidationError("cannot open config: " + config_file);
    const json j = json::parse(is);
    if (j.contains("configs")) {
      spec.configs.clear();
      for (const json& c : j["configs"]) spec.configs.push_back(parse_config_spec(c));
    }
    if (j.contains("runs")) spec.runs = j["runs"];
    if (j.contains("seed")) spec.seed = j["seed"];
    if (j.contains("duration_cap")) spec.duration_cap = j["duration_cap"];
    if (j.contains("params")) apply_params_json(j["params"], spec.base.guidance);
    if (j.contains("rel_mae")) spec.base.loc.rel_mae = j["rel_mae"];
  }
  const sim::GapReport report = sim::run_gap_experiment(spec, threads);
  write_file(out_dir, "results.csv",
             [&](std::ostream& os) { sim::write_gap_results_csv(report, os); });
  write_file(out_dir, "summary.csv",
             [&](std::ostream& os) { sim::write_gap_summary_csv(report, os); });
  write_file(out_dir, "path_size_histogram.csv", [&](std::ostream& os) {
    sim::write_path_size_histogram_csv(report.path_message_sizes, os);
  });
  write_file(out_dir, "bandwidth.csv", [&](std::ostream& os) {
    sim::write_bandwidth_csv(sim::make_bandwidth_report(report.path_message_sizes), os);
  });
  const auto successes = sim::gap_successes(report);
  for (const auto& c : spec.configs) {
    std::cout << c.name << ":";
    for (double d : spec.ds_values) {
      char buf[48];
      std::snprintf(buf, sizeof buf, " %.2f->%d/%d", d, successes.at({c.name, d}), spec.runs);
      std::cout << buf;
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_sim_forest(std::uint64_t seed, int goals, int runs, double density,
                   const std::string& out_dir, int threads, const std::string& svg_file) {
  sim::ForestExperimentSpec spec;
  spec.seed = seed;
  spec.goals = goals;
  spec.runs = runs;
  spec.density = density;
  const sim::ForestReport report = sim::run_forest_experiment(spec, threads);
  write_file(out_dir, "forest_results.csv",
             [&](std::ostream& os) { sim::write_forest_results_csv(report, os); });
  write_file(out_dir, "forest_path_size_histogram.csv", [&](std::ostream& os) {
    sim::write_path_size_histogram_csv(report.path_message_sizes, os);
  });
  int ok = 0;
  for (const auto& r : report.records) ok += r.outcome == sim::RunOutcome::Success;
  std::cout << "forest: " << ok << "/" << spec.runs << " missions reached all goals\n";

  if (!svg_file.empty()) {
    // render the first run's world and trajectories
    sim::World world;
    std::vector<Vec3> tp, ts;
    sim::run_forest_once(report.records.front().seed, spec, &tp, &ts, &world);
    SvgWriter svg;
    MultiPolygon trees;
    for (const auto& c : world.cylinders)
      trees.parts.push_back(Polygon{poly_detail::disc_ring(c.center, c.radius, 16), {}});
    svg.add_multipolygon("trees", trees, "#607050a0");
    std::vector<Vec2> p2, s2;
    for (const Vec3& p : tp) p2.push_back(p.xy());
    for (const Vec3& p : ts) s2.push_back(p.xy());
    svg.add_polyline("primary", p2, "#c03030", 0.08);
    svg.add_polyline("secondary", s2, "#202020", 0.08);
    std::ofstream os(svg_file);
    svg.write(os);
    std::cerr << "wrote " << svg_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative guidance stack: planning, viewpoints, simulation studies"};
  app.require_subcommand(1);

  std::string map_file, start_s, goal_s, out_file = "-";
  double d_min = 0.8, unknown_penalty = 2.0, plan_timeout = 10.0;
  auto* plan = app.add_subcommand("plan", "A* path on a voxmap file");
  plan->add_option("--map", map_file, "voxmap v1 file")->required();
  plan->add_option("--start", start_s, "start pose x,y,z[,heading]")->required();
  plan->add_option("--goal", goal_s, "goal pose x,y,z[,heading]")->required();
  plan->add_option("--dmin", d_min, "clearance [m]");
  plan->add_option("--unknown-penalty", unknown_penalty, "cost multiplier in Unknown");
  plan->add_option("--timeout", plan_timeout, "planner timeout [s]");
  plan->add_option("--out", out_file, "output CSV (x,y,z,heading), - for stdout");

  std::string path_file, primary_s, params_file, svg_file;
  auto* vp = app.add_subcommand("viewpoint", "guiding viewpoint for a path");
  vp->add_option("--map", map_file, "voxmap v1 file")->required();
  vp->add_option("--path", path_file, "path CSV (x,y,z,heading)")->required();
  vp->add_option("--primary", primary_s, "primary position x,y,z")->required();
  vp->add_option("--params", params_file, "JSON parameter overrides");
  vp->add_option("--svg", svg_file, "write region layers (V_i, B, S, I_all) as SVG");

  std::string sweep_s = "0.3:0.8:0.05", config_file, out_dir;
  int runs = 10, threads = 2, goals = 1;
  std::uint64_t seed = 1;
  double density = 0.05;
  auto* gap = app.add_subcommand("sim-gap", "two-room gap study");
  gap->add_option("--ds-sweep", sweep_s, "d_S sweep lo:hi:step or comma list");
  gap->add_option("--runs", runs, "runs per (config, d_S)");
  gap->add_option("--seed", seed, "base seed");
  gap->add_option("--config", config_file, "JSON experiment config");
  gap->add_option("--out", out_dir, "output directory (default cwd)");
  gap->add_option("--threads", threads, "worker threads");

  auto* forest = app.add_subcommand("sim-forest", "forest incremental-goal missions");
  forest->add_option("--seed", seed, "base seed");
  forest->add_option("--goals", goals, "number of +4 m goals per mission");
  forest->add_option("--runs", runs, "number of seeded missions");
  forest->add_option("--density", density, "trees per square meter");
  forest->add_option("--out", out_dir, "output directory (default cwd)");
  forest->add_option("--threads", threads, "worker threads");
  forest->add_option("--svg", svg_file, "render the first mission as SVG");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return cmd_plan(map_file, start_s, goal_s, d_min, unknown_penalty, plan_timeout,
                               out_file);
    if (*vp) return cmd_viewpoint(map_file, path_file, primary_s, params_file, svg_file);
    if (*gap) return cmd_sim_gap(sweep_s, runs, seed, config_file, out_dir, threads);
    if (*forest)
      return cmd_sim_forest(seed, goals, runs, density, out_dir, threads, svg_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
