#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "coguide/voxel_map.hpp"

#include "support/oracles.hpp"

using namespace coguide;

namespace {

OccupancyMap small_map(double res = 0.1, double size = 3.2) {
  return OccupancyMap(res, Vec3{0, 0, 0}, Vec3{size, size, size});
}

}  // namespace

TEST_CASE("integrate_scan: empty scan leaves the map unchanged") {
  OccupancyMap m = small_map();
  m.integrate_scan({0, 0, 0}, {}, 0.0);
  int non_unknown = 0;
  for (int z = 0; z < m.nz(); ++z)
    for (int y = 0; y < m.ny(); ++y)
      for (int x = 0; x < m.nx(); ++x)
        if (m.state_at({x, y, z}) != CellState::Unknown) ++non_unknown;
  CHECK(non_unknown == 0);
}

TEST_CASE("integrate_scan: single axis hit carves the ray (DDA oracle)") {
  OccupancyMap m = small_map();
  const Vec3 origin{0.05, 0.05, 0.05};  // a voxel center
  const Vec3 hit{1.05, 0.05, 0.05};     // 1 m ahead on x
  m.integrate_scan(origin, {hit}, 5.0);

  const VoxelIndex o = m.index_of(origin);
  const VoxelIndex h = m.index_of(hit);
  CHECK(h.x - o.x == 10);
  CHECK(m.state_at(h) == CellState::Occupied);
  int free_between = 0;
  for (int x = o.x + 1; x < h.x; ++x) {
    if (m.state_at({x, o.y, o.z}) == CellState::Free) ++free_between;
  }
  CHECK(free_between == 9);
}

TEST_CASE("integrate_scan: occupied absorbs within one call") {
  OccupancyMap m = small_map();
  const Vec3 origin{0.05, 0.05, 0.05};
  // ray 1 hits a voxel; ray 2 passes through the same voxel farther on
  const Vec3 hit1{0.85, 0.05, 0.05};
  const Vec3 hit2{1.45, 0.05, 0.05};
  m.integrate_scan(origin, {hit1, hit2}, 5.0);
  CHECK(m.state(hit1) == CellState::Occupied);
  CHECK(m.state(hit2) == CellState::Occupied);

  // previously Occupied cells are not carved back to Free
  OccupancyMap m2 = small_map();
  m2.set_state(m2.index_of({0.55, 0.05, 0.05}), CellState::Occupied);
  m2.integrate_scan(origin, {hit2}, 5.0);
  CHECK(m2.state({0.55, 0.05, 0.05}) == CellState::Occupied);
}

TEST_CASE("state: outside region is Unknown, tie rule is deterministic") {
  OccupancyMap m(0.25, Vec3{0, 0, 0}, Vec3{4, 4, 4});
  CHECK(m.state({100, 0, 0}) == CellState::Unknown);

  // point exactly on a voxel face goes to the larger index
  const VoxelIndex left = m.index_of({-1e-9, 0.1, 0.1});
  const VoxelIndex at = m.index_of({0.0, 0.1, 0.1});
  CHECK(at.x == left.x + 1);
  m.set_state(at, CellState::Occupied);
  CHECK(m.state({0.0, 0.1, 0.1}) == CellState::Occupied);
  CHECK(m.state({-1e-9, 0.1, 0.1}) == CellState::Unknown);
}

TEST_CASE("add_obstacle_box: single voxel, Table-style block, copy independence") {
  OccupancyMap m = small_map(0.1, 1.0);
  const Vec3 c = m.center_of({5, 5, 5});

  const OccupancyMap one = m.add_obstacle_box(c, 0.1, 0.1);
  int occupied = 0;
  for (int z = 0; z < one.nz(); ++z)
    for (int y = 0; y < one.ny(); ++y)
      for (int x = 0; x < one.nx(); ++x)
        if (one.state_at({x, y, z}) == CellState::Occupied) ++occupied;
  CHECK(occupied == 1);
  CHECK(one.state(c) == CellState::Occupied);

  // copy independence
  CHECK(m.state(c) == CellState::Unknown);

  // w=1.5, h=10 at 0.1 res marks a 15 x 15 x 100 block
  OccupancyMap big(0.1, Vec3{0, 0, 0}, Vec3{4, 4, 12});
  const Vec3 bc = big.center_of(big.index_of({0, 0, 0}));
  const OccupancyMap boxed = big.add_obstacle_box(bc, 1.5, 10.0);
  std::int64_t n = 0;
  int min_x = 1 << 30, max_x = -(1 << 30), min_z = 1 << 30, max_z = -(1 << 30);
  for (int z = 0; z < boxed.nz(); ++z)
    for (int y = 0; y < boxed.ny(); ++y)
      for (int x = 0; x < boxed.nx(); ++x)
        if (boxed.state_at({x, y, z}) == CellState::Occupied) {
          ++n;
          min_x = std::min(min_x, x);
          max_x = std::max(max_x, x);
          min_z = std::min(min_z, z);
          max_z = std::max(max_z, z);
        }
  CHECK(n == 15LL * 15 * 100);
  CHECK(max_x - min_x + 1 == 15);
  CHECK(max_z - min_z + 1 == 100);
}

TEST_CASE("add_obstacle_box never flips Occupied to Free") {
  OccupancyMap m = small_map(0.1, 1.0);
  m.set_state({2, 2, 2}, CellState::Occupied);
  const OccupancyMap out = m.add_obstacle_box(m.center_of({7, 7, 7}), 0.3, 0.3);
  CHECK(out.state_at({2, 2, 2}) == CellState::Occupied);
}

TEST_CASE("raycast: no obstacle returns endpoint; wall intersects analytically") {
  OccupancyMap m(0.1, Vec3{0, 0, 0}, Vec3{8, 2, 2});
  const Vec3 from{-3.55, 0.05, 0.05};
  const Vec3 to{2.45, 0.05, 0.05};
  CHECK((m.raycast(from, to) - to).norm() == 0.0);

  // wall plane at x = -1.55 .. -1.45 (one voxel column across y/z)
  for (int y = 0; y < m.ny(); ++y)
    for (int z = 0; z < m.nz(); ++z) m.set_state({m.index_of({-1.5, 0, 0}).x, y, z},
                                                 CellState::Occupied);
  const Vec3 hit = m.raycast(from, to);
  // 2 m from start: wall voxel center within res/2 of the analytic plane
  CHECK(std::abs(hit.x - (-1.5)) <= 0.05 + 1e-12);
  CHECK(std::abs((hit - from).norm() - 2.05) <= 0.051);

  // from inside an occupied voxel: blocked at origin
  const Vec3 inside{-1.5, 0.05, 0.05};
  const Vec3 res = m.raycast(inside, to);
  CHECK((res - m.center_of(m.index_of(inside))).norm() < 1e-12);
}

TEST_CASE("raycast: result lies on the segment and prefix is clear (property)") {
  test_support::Lcg rng(99);
  OccupancyMap m(0.1, Vec3{0, 0, 0}, Vec3{3.2, 3.2, 3.2});
  for (int i = 0; i < 200; ++i) {
    const VoxelIndex v{rng.uniform_int(0, m.nx() - 1), rng.uniform_int(0, m.ny() - 1),
                       rng.uniform_int(0, m.nz() - 1)};
    m.set_state(v, CellState::Occupied);
  }
  const double lim = 1.55;
  for (int iter = 0; iter < 100; ++iter) {
    const Vec3 a{rng.uniform(-lim, lim), rng.uniform(-lim, lim), rng.uniform(-lim, lim)};
    const Vec3 b{rng.uniform(-lim, lim), rng.uniform(-lim, lim), rng.uniform(-lim, lim)};
    const Vec3 r = m.raycast(a, b);
    if ((r - b).norm() == 0.0) continue;  // unobstructed
    // r within res*sqrt(3)/2 of the segment
    const Vec3 d = b - a;
    const double t = std::clamp((r - a).dot(d) / d.squared_norm(), 0.0, 1.0);
    CHECK((r - (a + d * t)).norm() <= 0.1 * std::sqrt(3.0) / 2.0 + 1e-9);
  }
}

TEST_CASE("obs_dist: empty map is infinite, axis case exact, brute-force oracle") {
  OccupancyMap empty = small_map(0.1, 1.0);
  CHECK(empty.obs_dist({0.05, 0.05, 0.05}) == kInfinity);

  OccupancyMap m = small_map(0.1, 3.2);
  const VoxelIndex occ{16, 16, 16};
  m.set_state(occ, CellState::Occupied);
  const VoxelIndex probe{6, 16, 16};  // 10 cells away on x
  CHECK(m.obs_dist_at(probe) == Catch::Approx(1.0).epsilon(1e-12));

  // random maps vs brute force (exact match of squared cell distances)
  test_support::Lcg rng(1234);
  for (int trial = 0; trial < 12; ++trial) {
    OccupancyMap r(0.1, Vec3{0, 0, 0}, Vec3{1.6, 1.6, 1.6});  // 16^3
    const int n_occ = rng.uniform_int(0, 40);
    for (int i = 0; i < n_occ; ++i)
      r.set_state({rng.uniform_int(0, 15), rng.uniform_int(0, 15), rng.uniform_int(0, 15)},
                  CellState::Occupied);
    for (int probe_i = 0; probe_i < 30; ++probe_i) {
      const VoxelIndex v{rng.uniform_int(0, 15), rng.uniform_int(0, 15), rng.uniform_int(0, 15)};
      const double brute = test_support::brute_obs_dist(r, v);
      const double fast = r.obs_dist_at(v);
      if (brute == kInfinity) {
        CHECK(fast == kInfinity);
      } else {
        CHECK(fast == Catch::Approx(brute).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("obs_dist: Lipschitz across adjacent voxels (property)") {
  test_support::Lcg rng(555);
  OccupancyMap m(0.1, Vec3{0, 0, 0}, Vec3{1.6, 1.6, 1.6});
  for (int i = 0; i < 25; ++i)
    m.set_state({rng.uniform_int(0, 15), rng.uniform_int(0, 15), rng.uniform_int(0, 15)},
                CellState::Occupied);
  const double bound = 0.1 * std::sqrt(3.0) + 1e-9;
  for (int z = 0; z + 1 < m.nz(); ++z)
    for (int y = 0; y + 1 < m.ny(); ++y)
      for (int x = 0; x + 1 < m.nx(); ++x) {
        const double d0 = m.obs_dist_at({x, y, z});
        const double d1 = m.obs_dist_at({x + 1, y + 1, z + 1});
        CHECK(std::abs(d0 - d1) <= bound);
      }
}

TEST_CASE("recentering: region follows the sensor, lattice preserved") {
  OccupancyMap m(0.1, Vec3{0, 0, 0}, Vec3{2.0, 2.0, 2.0});
  m.set_state(m.index_of({0.05, 0.05, 0.05}), CellState::Occupied);
  // drift the sensor far along +x: the region should recenter
  m.integrate_scan({0.85, 0.05, 0.05}, {}, 0.0);
  CHECK(m.center().x > 0.0);
  // the occupied voxel is still inside and still occupied
  CHECK(m.state({0.05, 0.05, 0.05}) == CellState::Occupied);
  // lattice alignment: voxel centers stay at k*res + res/2
  const Vec3 c = m.center_of({0, 0, 0});
  const double frac = std::abs(std::remainder(c.x - 0.05, 0.1));
  CHECK(frac < 1e-9);
}

TEST_CASE("voxmap dump format: golden header and round trip") {
  OccupancyMap m(0.5, Vec3{1, 1, 1}, Vec3{1.0, 1.0, 1.0});
  m.set_state({0, 0, 0}, CellState::Free);
  m.set_state({1, 1, 1}, CellState::Occupied);
  std::ostringstream os;
  m.save(os);
  const std::string golden =
      "voxmap v1 0.5 0.5 0.5 0.5 2 2 2\n"
      "0 0 0 0\n"
      "1 1 1 1\n";
  CHECK(os.str() == golden);

  std::istringstream is(os.str());
  const OccupancyMap back = OccupancyMap::load(is);
  CHECK(back.resolution() == m.resolution());
  CHECK(back.nx() == m.nx());
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) CHECK(back.state_at({x, y, z}) == m.state_at({x, y, z}));
}
