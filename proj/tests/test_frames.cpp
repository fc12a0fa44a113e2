#include <catch2/catch_amalgamated.hpp>

#include "coguide/frames.hpp"

#include "support/oracles.hpp"

using namespace coguide;

namespace {

Transform4DOF t4(double x, double y, double z, double yaw, const char* from = "A",
                 const char* to = "B") {
  return Transform4DOF({x, y, z}, yaw, FrameId{from}, FrameId{to});
}

bool near(const Vec3& a, const Vec3& b, double tol = 1e-9) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol;
}

}  // namespace

TEST_CASE("compose: identity and inverse") {
  const auto t = t4(1.0, 2.0, 3.0, 0.7);
  const auto id_b = Transform4DOF::identity(FrameId{"B"});
  const auto c = compose(id_b, t);
  CHECK(near(c.translation, t.translation));
  CHECK(c.yaw == Catch::Approx(t.yaw));
  CHECK(c.from == t.from);
  CHECK(c.to == t.to);

  const auto round = compose(t, invert(t));
  CHECK(near(round.translation, Vec3{0, 0, 0}, 1e-9));
  CHECK(std::abs(round.yaw) < 1e-12);
}

TEST_CASE("compose: hand-evaluated rotation case") {
  // (t=(1,0,0), yaw=pi/2) o (t=(1,0,0), yaw=0) -> t=(1,1,0), yaw=pi/2
  const auto a = t4(1, 0, 0, M_PI / 2, "B", "C");
  const auto b = t4(1, 0, 0, 0.0, "A", "B");
  const auto c = compose(a, b);
  CHECK(near(c.translation, Vec3{1, 1, 0}, 1e-12));
  CHECK(c.yaw == Catch::Approx(M_PI / 2));
  CHECK(c.from == FrameId{"A"});
  CHECK(c.to == FrameId{"C"});
}

TEST_CASE("compose: frame mismatch is a contract violation") {
  const auto a = t4(0, 0, 0, 0, "X", "Y");
  const auto b = t4(0, 0, 0, 0, "A", "B");
  CHECK_THROWS_AS(compose(a, b), std::logic_error);
}

TEST_CASE("invert: examples") {
  const auto id = Transform4DOF::identity(FrameId::L());
  const auto iid = invert(id);
  CHECK(near(iid.translation, Vec3{0, 0, 0}));
  CHECK(iid.yaw == 0.0);

  const auto pure_t = invert(t4(2, 0, 0, 0));
  CHECK(near(pure_t.translation, Vec3{-2, 0, 0}));
  CHECK(pure_t.yaw == 0.0);

  // matrix-inverse oracle for (t=(1,1,0), yaw=pi/2)
  const auto t = t4(1, 1, 0, M_PI / 2);
  const auto inv = invert(t);
  CHECK(near(inv.translation, Vec3{-1, 1, 0}, 1e-12));
  CHECK(inv.yaw == Catch::Approx(-M_PI / 2));
  CHECK(inv.from == t.to);
  CHECK(inv.to == t.from);
}

TEST_CASE("apply_path: identity, symmetry, homogeneous-matrix oracle") {
  const FrameId A{"A"};
  Path p(std::vector<Pose>{Pose({1, 0, 0}, 0.0, A), Pose({2, 1, 0.5}, 1.0, A)});

  const auto same = apply_path(Transform4DOF::identity(A), p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(near(same.poses[i].position, p.poses[i].position));
    CHECK(same.poses[i].heading == p.poses[i].heading);
  }

  // yaw = pi applied to (1,0,0,theta=0) -> (-1,0,0, theta = -pi normalized)
  Path single(std::vector<Pose>{Pose({1, 0, 0}, 0.0, A)});
  const auto flipped = apply_path(t4(0, 0, 0, M_PI, "A", "B"), single);
  CHECK(near(flipped.poses[0].position, Vec3{-1, 0, 0}, 1e-12));
  CHECK(flipped.poses[0].heading == Catch::Approx(-M_PI));
  CHECK(flipped.poses[0].heading >= -M_PI);
  CHECK(flipped.poses[0].heading < M_PI);

  // random 4-DOF transform on a 5-pose path vs per-pose 4x4 matrix oracle
  test_support::Lcg rng(42);
  for (int iter = 0; iter < 20; ++iter) {
    const auto t = t4(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5),
                      rng.uniform(-4, 4));
    std::vector<Pose> poses;
    for (int i = 0; i < 5; ++i)
      poses.emplace_back(Vec3{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)},
                         rng.uniform(-4, 4), A);
    const Path in(poses);
    const Path out = apply_path(t, in);
    for (int i = 0; i < 5; ++i) {
      const Vec3 expect = test_support::mat4_apply(t.translation, t.yaw, poses[i].position);
      CHECK(near(out.poses[i].position, expect, 1e-9));
      CHECK(out.poses[i].heading ==
            Catch::Approx(wrap_angle(poses[i].heading + t.yaw)).margin(1e-12));
    }
  }
}

TEST_CASE("frames: round trip and composition consistency properties") {
  test_support::Lcg rng(7);
  const FrameId A{"A"}, B{"B"}, C{"C"};
  for (int iter = 0; iter < 50; ++iter) {
    const auto t = Transform4DOF({rng.uniform(-10, 10), rng.uniform(-10, 10),
                                  rng.uniform(-10, 10)},
                                 rng.uniform(-8, 8), A, B);
    const auto u = Transform4DOF({rng.uniform(-10, 10), rng.uniform(-10, 10),
                                  rng.uniform(-10, 10)},
                                 rng.uniform(-8, 8), B, C);
    std::vector<Pose> poses;
    for (int i = 0; i < 4; ++i)
      poses.emplace_back(Vec3{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)},
                         rng.uniform(-8, 8), A);
    const Path p(poses);

    const Path round = apply_path(invert(t), apply_path(t, p));
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(near(round.poses[i].position, p.poses[i].position, 1e-9));
      CHECK(round.poses[i].heading >= -M_PI);
      CHECK(round.poses[i].heading < M_PI);
    }

    const Path via_compose = apply_path(compose(u, t), p);
    const Path via_two = apply_path(u, apply_path(t, p));
    for (std::size_t i = 0; i < p.size(); ++i)
      CHECK(near(via_compose.poses[i].position, via_two.poses[i].position, 1e-9));
  }
}

TEST_CASE("heading wrap convention") {
  CHECK(wrap_angle(M_PI) == -M_PI);
  CHECK(wrap_angle(-M_PI) == -M_PI);
  CHECK(wrap_angle(3 * M_PI) == Catch::Approx(-M_PI));
  CHECK(wrap_angle(0.5) == Catch::Approx(0.5));
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    CHECK(w >= -M_PI);
    CHECK(w < M_PI);
  }
}
