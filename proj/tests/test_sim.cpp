#include <catch2/catch_amalgamated.hpp>

#include "coguide/sim/codec.hpp"
#include "coguide/sim/lidar.hpp"
#include "coguide/sim/localization.hpp"
#include "coguide/sim/rng.hpp"
#include "coguide/sim/vehicle.hpp"
#include "coguide/sim/world.hpp"
#include "coguide/voxel_map.hpp"

#include "support/oracles.hpp"

using namespace coguide;
using namespace coguide::sim;

TEST_CASE("make_gap_world: width formula and analytic geometry") {
  CHECK(gap_width(0.4, 0.1) == Catch::Approx(0.95));
  CHECK(gap_width(0.8, 0.1) == Catch::Approx(1.75));

  const World w = make_gap_world(0.4, 0.1);
  // gap centerline is obstacle-free
  for (double z = 0.3; z < 4.8; z += 0.3)
    for (double x = -0.3; x <= 0.3; x += 0.05) CHECK(w.distance({x, 0.0, z}) > 0.0);
  // wall material just beyond the slot edge
  CHECK(w.inside_obstacle({0.0, 0.95 / 2 + 0.05, 2.0}));
  CHECK(w.inside_obstacle({0.0, -0.95 / 2 - 0.05, 2.0}));
  // scanning marks wall voxels Occupied near the slot edge
  OccupancyMap m(0.1, Vec3{0, 0, 1.6}, Vec3{8, 8, 2});
  LidarSpec spec;
  const Pose sensor({-2.0, 0.0, 1.6}, 0.0, FrameId::L());
  const LidarScan scan = simulate_lidar_full(w, sensor, spec);
  m.integrate_scan(sensor.position, scan.hits, spec.max_range, scan.misses);
  CHECK(m.state({-0.05, 1.2, 1.65}) == CellState::Occupied);
  CHECK(m.state({-0.3, 0.0, 1.65}) == CellState::Free);
}

TEST_CASE("make_forest_world: determinism and Poisson statistics") {
  const World a = make_forest_world(7, 0.05, 0.1, 0.3);
  const World b = make_forest_world(7, 0.05, 0.1, 0.3);
  REQUIRE(a.cylinders.size() == b.cylinders.size());
  for (std::size_t i = 0; i < a.cylinders.size(); ++i) {
    CHECK(a.cylinders[i].center == b.cylinders[i].center);
    CHECK(a.cylinders[i].radius == b.cylinders[i].radius);
  }
  CHECK(make_forest_world(8, 0.0, 0.1, 0.3).cylinders.empty());

  // density 0.05 over 50x50: mean 125 (minus the small start clearing);
  // average over seeds stays within 3 sigma of the Poisson mean
  double total = 0.0;
  const int n_seeds = 40;
  for (int s = 0; s < n_seeds; ++s)
    total += static_cast<double>(make_forest_world(1000 + s, 0.05, 0.1, 0.3).cylinders.size());
  const double mean = total / n_seeds;
  const double clearing_fraction = M_PI * 2.2 * 2.2 / 2500.0;
  const double expect = 125.0 * (1.0 - clearing_fraction);
  const double sigma = std::sqrt(125.0 / n_seeds);
  CHECK(std::abs(mean - expect) <= 3.2 * sigma);

  // start area is clear
  for (const auto& c : a.cylinders) CHECK(c.center.norm() > 2.0);
}

TEST_CASE("simulate_lidar: empty world, ray spacing, ray-box oracle") {
  World empty;
  empty.bounds = {{-10, -10, -1}, {10, 10, 10}};
  LidarSpec spec;
  const Pose pose({0, 0, 2}, 0.3, FrameId::L());
  CHECK(simulate_lidar(empty, pose, spec).empty());

  // wall 5 m ahead, single horizontal ring of 256 beams: adjacent-ray
  // spacing at the wall ~ 2*pi*5/256 = 0.123 m (the paper's 0.12 m figure)
  World wall;
  wall.bounds = {{-10, -10, -1}, {10, 10, 10}};
  wall.boxes.push_back({{5.0, -10, -1}, {5.3, 10, 10}});
  LidarSpec ring = spec;
  ring.v_beams = 4;  // downsampled by 4 -> one horizontal ring
  const Pose origin({0, 0, 2}, 0.0, FrameId::L());
  const auto hits = simulate_lidar(wall, origin, ring);
  REQUIRE(!hits.empty());
  std::vector<Vec3> plane;
  for (const Vec3& h : hits)
    if (std::abs(h.y) < 0.5) plane.push_back(h);
  REQUIRE(plane.size() >= 2);
  std::sort(plane.begin(), plane.end(), [](const Vec3& a, const Vec3& b) { return a.y < b.y; });
  double spacing = 0.0;
  for (std::size_t i = 0; i + 1 < plane.size(); ++i)
    spacing = std::max(spacing, plane[i + 1].y - plane[i].y);
  CHECK(spacing == Catch::Approx(2 * M_PI * 5.0 / 256).epsilon(0.05));
  for (const Vec3& h : plane) CHECK(h.z == Catch::Approx(2.0).margin(1e-12));

  // brute ray-box oracle: every hit lies on a box surface at the first
  // slab intersection of its own ray
  test_support::Lcg rng(4);
  for (int i = 0; i < 50; ++i) {
    const Vec3 h = hits[rng.uniform_int(0, static_cast<int>(hits.size()) - 1)];
    CHECK(std::abs(wall.distance(h)) < 1e-9);
  }
}

TEST_CASE("relative_loc_sample: ground truth mode and calibrated error norm") {
  const Transform4DOF t({1, 2, 0.5}, 0.3, FrameId::L(), FrameId::S());
  LocalizationModel gt;
  Rng rng(5);
  const Transform4DOF same = relative_loc_sample(t, gt, rng);
  CHECK(same.translation == t.translation);
  CHECK(same.yaw == t.yaw);

  LocalizationModel noisy;
  noisy.mode = LocalizationMode::Noisy;
  noisy.rel_mae = 0.10;
  double sum = 0.0;
  const int n = 100000;
  Rng rng2(123);
  for (int i = 0; i < n; ++i) {
    const Transform4DOF s = relative_loc_sample(t, noisy, rng2);
    sum += (s.translation - t.translation).norm();
  }
  CHECK(sum / n == Catch::Approx(0.100).margin(0.002));

  noisy.rel_mae = 0.0;
  noisy.rel_yaw_sigma = 0.0;
  const Transform4DOF degenerate = relative_loc_sample(t, noisy, rng2);
  CHECK(degenerate.translation == t.translation);
  CHECK(degenerate.yaw == t.yaw);
}

TEST_CASE("vio_step: zero drift exact, random-walk variance, seed independence") {
  LocalizationModel zero;
  zero.mode = LocalizationMode::Noisy;
  zero.vio_pos_drift = 0.0;
  zero.vio_yaw_drift = 0.0;
  VioState s;
  Rng rng(9);
  for (int i = 0; i < 100; ++i) vio_step(s, zero, 0.1, rng);
  CHECK(s.pos_error.norm() == 0.0);

  // pos_drift = 0.05 over 100 s: RMS drift per axis = 0.05 * sqrt(100) = 0.5
  LocalizationModel drift;
  drift.mode = LocalizationMode::Noisy;
  drift.vio_pos_drift = 0.05;
  const int runs = 300;
  double sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    VioState v;
    Rng rr(100 + r);
    for (int i = 0; i < 1000; ++i) vio_step(v, drift, 0.1, rr);
    sq += v.pos_error.x * v.pos_error.x;
  }
  CHECK(std::sqrt(sq / runs) == Catch::Approx(0.5).epsilon(0.15));

  // independence across seeds: empirical correlation small
  double sum_xy = 0.0, sum_x = 0.0, sum_y = 0.0, sum_x2 = 0.0, sum_y2 = 0.0;
  const int pairs = 100;
  for (int r = 0; r < pairs; ++r) {
    VioState va, vb;
    Rng ra(500 + r), rb(900 + r);
    for (int i = 0; i < 200; ++i) {
      vio_step(va, drift, 0.1, ra);
      vio_step(vb, drift, 0.1, rb);
    }
    sum_x += va.pos_error.x;
    sum_y += vb.pos_error.x;
    sum_xy += va.pos_error.x * vb.pos_error.x;
    sum_x2 += va.pos_error.x * va.pos_error.x;
    sum_y2 += vb.pos_error.x * vb.pos_error.x;
  }
  const double n = pairs;
  const double corr = (sum_xy - sum_x * sum_y / n) /
                      std::sqrt((sum_x2 - sum_x * sum_x / n) * (sum_y2 - sum_y * sum_y / n));
  CHECK(std::abs(corr) < 0.2);
}

TEST_CASE("uav_step: hover, straight-line timing, step-bound property") {
  UavState uav;
  uav.pose = Pose({0, 0, 1}, 0, FrameId::L());
  uav_step(uav, 1.0, 0.1);
  CHECK(uav.pose.position == Vec3{0, 0, 1});

  // 4 m straight path at 1 m/s arrives in ~4 s
  uav.set_path(Path({Pose({4, 0, 1}, 0, FrameId::L())}));
  double t = 0.0;
  while (!uav.hovering() && t < 10.0) {
    uav_step(uav, 1.0, 0.1);
    t += 0.1;
  }
  CHECK(t == Catch::Approx(4.0).margin(0.15));
  CHECK((uav.pose.position - Vec3{4, 0, 1}).norm() <= 0.05 + 1e-9);

  // position error to the polyline bounded by speed*dt
  UavState v2;
  v2.pose = Pose({0, 0, 0}, 0, FrameId::L());
  std::vector<Pose> wps = {Pose({1, 0, 0}, 0, FrameId::L()), Pose({1, 1, 0}, 0, FrameId::L()),
                           Pose({2, 1, 0.5}, 0, FrameId::L())};
  v2.set_path(Path(wps));
  const double speed = 1.0, dt = 0.05;
  while (!v2.hovering()) {
    uav_step(v2, speed, dt);
    double best = kInfinity;
    const Vec3 segs[4] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 1, 0.5}};
    for (int s = 0; s < 3; ++s) {
      const Vec3 a = segs[s], b = segs[s + 1];
      const Vec3 d = b - a;
      const double tt = std::clamp((v2.pose.position - a).dot(d) / d.squared_norm(), 0.0, 1.0);
      best = std::min(best, (v2.pose.position - (a + d * tt)).norm());
    }
    CHECK(best <= speed * dt + 0.05 + 1e-9);
  }
}

TEST_CASE("codec: sizes, round trip, error paths") {
  const FrameId S = FrameId::S();
  CHECK(encode_path(Path{}, 1).size() == 11);

  std::vector<Pose> poses;
  for (int i = 0; i < 11; ++i) poses.emplace_back(Vec3{i * 0.5, 1, 2}, 0.1 * i, S);
  const auto bytes = encode_path(Path(poses), 42);
  CHECK(bytes.size() == 11 + 11 * 32);
  CHECK(bytes.size() == 363);

  const auto decoded = decode_message(bytes, S);
  REQUIRE(decoded.has_value());
  CHECK(decoded->kind == MessageKind::PathMsg);
  CHECK(decoded->seq == 42);
  REQUIRE(decoded->poses.size() == 11);
  for (int i = 0; i < 11; ++i) {
    CHECK(decoded->poses[i].position == poses[i].position);
    CHECK(decoded->poses[i].heading == poses[i].heading);
  }

  const auto odo = encode_odometry(Pose({1, 2, 3}, 0.5, S), 7);
  CHECK(odo.size() == 43);
  const auto odo_dec = decode_message(odo, S);
  REQUIRE(odo_dec.has_value());
  CHECK(odo_dec->kind == MessageKind::Odometry);

  // round-trip property over random paths (bit exactness)
  test_support::Lcg rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Pose> p;
    const int n = rng.uniform_int(0, 40);
    for (int i = 0; i < n; ++i)
      p.emplace_back(Vec3{rng.uniform(-100, 100), rng.uniform(-100, 100),
                          rng.uniform(-100, 100)},
                     rng.uniform(-3, 3), S);
    const WireMessage msg{MessageKind::PathMsg, static_cast<std::uint32_t>(trial), p};
    const auto enc = encode_message(msg);
    const auto dec = decode_message(enc, S);
    REQUIRE(dec.has_value());
    REQUIRE(dec->poses.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(dec->poses[i].position == p[i].position);
      CHECK(dec->poses[i].heading == p[i].heading);
    }
  }

  // bad magic and truncation
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_FALSE(decode_message(bad, S).has_value());
  auto trunc = bytes;
  trunc.pop_back();
  CHECK_FALSE(decode_message(trunc, S).has_value());
  CHECK_FALSE(decode_message({}, S).has_value());
}

TEST_CASE("world distance: boxes and cylinders exact") {
  World w;
  w.bounds = {{-10, -10, -1}, {10, 10, 10}};
  w.boxes.push_back({{0, 0, 0}, {1, 1, 1}});
  w.cylinders.push_back({{5, 5}, 0.5, 0.0, 3.0});

  CHECK(w.distance({2, 0.5, 0.5}) == Catch::Approx(1.0));
  CHECK(w.distance({0.5, 0.5, 0.5}) < 0.0);                       // inside the box
  CHECK(w.distance({5, 5, 4.0}) == Catch::Approx(1.0));           // above cylinder cap
  CHECK(w.distance({5, 6.5, 1.0}) == Catch::Approx(1.0));         // beside cylinder
  CHECK(w.distance({5, 5, 1.0}) == Catch::Approx(-0.5));          // inside cylinder
  const double d = w.distance({7, 7, 5});
  const double expect = std::hypot(std::hypot(2, 2) - 0.5, 2.0);  // diagonal + cap
  CHECK(d == Catch::Approx(expect));
}
