#include <doctest.h>

#include <kinsolve/errors.hpp>
#include <kinsolve/harness.hpp>
#include <kinsolve/so3.hpp>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace kinsolve;
using namespace kinsolve::so3;
using kinsolve::test::frob;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("skew matches the cross product") {
  CHECK((skew(Vec3(0, 0, 1)) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() == 0.0);
  CHECK(skew(Vec3::Zero()).norm() == 0.0);
  CHECK((skew(Vec3(1, 2, 3)) * Vec3(1, 2, 3)).norm() == 0.0);

  harness::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.unit_vector() * rng.uniform(0.1, 4.0);
    const Vec3 w = rng.unit_vector() * rng.uniform(0.1, 4.0);
    CHECK((skew(v) * w - v.cross(w)).norm() < 1e-15);
    CHECK((skew(v) + skew(v).transpose()).norm() == 0.0);
  }
}

TEST_CASE("swing_between frozen examples") {
  Mat3 quarter_z;
  // clang-format off
  quarter_z << 0, -1, 0,
               1,  0, 0,
               0,  0, 1;
  // clang-format on
  CHECK(frob(swing_between(Vec3(1, 0, 0), Vec3(0, 2, 0)), quarter_z) < 1e-15);
  CHECK(frob(swing_between(Vec3(1, 0, 0), Vec3(3, 0, 0)), Mat3::Identity()) == 0.0);

  // 90 degrees about z, verified through the axis-angle route.
  const Rot3 r = swing_between(Vec3(1, 1, 0), Vec3(-1, 1, 0));
  CHECK(frob(r, test::rot_z(kPi / 2)) < 1e-15);
  const AxisAngle aa = to_axis_angle(r);
  CHECK(std::abs(aa.angle - kPi / 2) < 1e-12);
  CHECK((aa.axis - Vec3::UnitZ()).norm() < 1e-12);
  CHECK((r * Vec3(1, 1, 0).normalized() - Vec3(-1, 1, 0).normalized()).norm() < 1e-15);
}

TEST_CASE("swing_between maps t to p with axis perpendicular to both") {
  harness::Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const Vec3 t = rng.unit_vector() * rng.uniform(0.2, 3.0);
    const Vec3 p = rng.unit_vector() * rng.uniform(0.2, 3.0);
    const Rot3 r = swing_between(t, p);
    CHECK(is_rotation(r));
    CHECK((r * t.normalized() - p.normalized()).norm() < 1e-9);
    if (t.normalized().cross(p.normalized()).norm() > 1e-6) {
      const AxisAngle aa = to_axis_angle(r);
      CHECK(std::abs(aa.axis.dot(t.normalized())) < 1e-9);
      CHECK(std::abs(aa.axis.dot(p.normalized())) < 1e-9);
    }
  }
}

TEST_CASE("swing_between antiparallel fallback is deterministic") {
  const Rot3 a = swing_between(Vec3::UnitX(), -Vec3::UnitX());
  const Rot3 b = swing_between(Vec3::UnitX(), -Vec3::UnitX());
  CHECK(frob(a, b) == 0.0);
  CHECK(is_rotation(a));
  CHECK((a * Vec3::UnitX() + Vec3::UnitX()).norm() < 1e-12);

  CHECK_THROWS_AS(swing_between(Vec3::Zero(), Vec3::UnitX()), KinError);
  CHECK_THROWS_AS(swing_between(Vec3::UnitX(), Vec3::Zero()), KinError);
}

TEST_CASE("twist_about frozen examples") {
  Mat3 quarter_z;
  // clang-format off
  quarter_z << 0, -1, 0,
               1,  0, 0,
               0,  0, 1;
  // clang-format on
  CHECK(frob(twist_about(Vec3(0, 0, 2), kPi / 2), quarter_z) < 1e-15);
  CHECK(frob(twist_about(Vec3(0.3, -1.0, 2.2), 0.0), Mat3::Identity()) == 0.0);
  CHECK(frob(twist_about(Vec3(0, 0, 1), kPi), Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()) <
        1e-15);
  CHECK_THROWS_AS(twist_about(Vec3::Zero(), 1.0), KinError);
}

TEST_CASE("twist_about fixes its axis") {
  harness::Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const Vec3 t = rng.unit_vector() * rng.uniform(0.05, 5.0);
    const double phi = rng.uniform(-kPi, kPi);
    const Rot3 r = twist_about(t, phi);
    CHECK(is_rotation(r));
    CHECK((r * t - t).norm() < 1e-12 * t.norm());
  }
}

TEST_CASE("compose_twist_swing order and bone direction") {
  CHECK(frob(compose_twist_swing(Mat3::Identity(), Mat3::Identity()), Mat3::Identity()) == 0.0);
  const Rot3 rz = test::rot_z(kPi / 2);
  CHECK(frob(compose_twist_swing(rz, Mat3::Identity()), rz) == 0.0);

  const Rot3 swing = swing_between(Vec3::UnitX(), Vec3::UnitY());
  const Rot3 twist = twist_about(Vec3::UnitX(), kPi / 6);
  const Rot3 r = compose_twist_swing(swing, twist);
  CHECK(frob(r, swing * twist) == 0.0);
  // The twist pre-rotation leaves the bone image untouched.
  CHECK((r * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-15);
}

TEST_CASE("extract_twist frozen examples") {
  const auto [swing_id, twist_id] = extract_twist(Mat3::Identity(), Vec3(0.2, 0.5, -1.0));
  CHECK(frob(swing_id, Mat3::Identity()) < 1e-15);
  CHECK(std::abs(twist_id.radians()) == 0.0);

  const Rot3 r = compose_twist_swing(swing_between(Vec3::UnitX(), Vec3::UnitY()),
                                     twist_about(Vec3::UnitX(), 0.5));
  const auto [swing, twist] = extract_twist(r, Vec3::UnitX());
  CHECK(std::abs(twist.radians() - 0.5) < 1e-12);
  CHECK(frob(swing, swing_between(Vec3::UnitX(), Vec3::UnitY())) < 1e-12);

  const auto pure = extract_twist(twist_about(Vec3::UnitZ(), -1.2), Vec3::UnitZ());
  CHECK(frob(pure.swing, Mat3::Identity()) < 1e-12);
  CHECK(std::abs(pure.twist.radians() + 1.2) < 1e-12);
}

TEST_CASE("extract_twist round trip on random decompositions") {
  harness::Rng rng(14);
  for (int i = 0; i < 400; ++i) {
    const Vec3 t = rng.unit_vector() * rng.uniform(0.1, 2.0);
    Vec3 p;
    do {
      p = rng.unit_vector();
    } while (t.normalized().dot(p) < -0.95);
    const double phi = rng.uniform(-kPi, kPi);
    const Rot3 swing = swing_between(t, p);
    const Rot3 r = compose_twist_swing(swing, twist_about(t, phi));

    const TwistSwing split = extract_twist(r, t);
    CHECK(std::abs(std::remainder(split.twist.radians() - phi, 2.0 * kPi)) < 1e-9);
    CHECK(frob(split.swing, swing) < 1e-9);
    CHECK(frob(compose_twist_swing(split.swing, twist_about(t, split.twist)), r) < 1e-9);
  }
}

TEST_CASE("extract_twist rejects the antiparallel case") {
  const Rot3 half_turn = so3::from_axis_angle({Vec3::UnitZ(), kPi});
  CHECK_THROWS_AS(extract_twist(half_turn, Vec3::UnitX()), KinError);
  CHECK_THROWS_AS(extract_twist(Mat3::Identity(), Vec3::Zero()), KinError);
}

TEST_CASE("angle encoding") {
  CHECK(angle_encode(0.0) == std::array<double, 2>{1.0, 0.0});
  CHECK(std::abs(angle_decode(1.0, 0.0)) == 0.0);
  CHECK(std::abs(angle_decode(-1.0, 0.0) - kPi) < 1e-15);

  // Scale invariance: (1.2, 1.6) is (0.6, 0.8) times two.
  CHECK(std::abs(angle_decode(1.2, 1.6) - std::atan2(0.8, 0.6)) < 1e-15);
  CHECK_THROWS_AS(angle_decode(0.0, 0.0), KinError);

  harness::Rng rng(15);
  for (int i = 0; i < 100; ++i) {
    const double phi = rng.uniform(-kPi, kPi);
    const auto [c, s] = angle_encode(phi);
    CHECK(std::abs(angle_decode(c, s) - phi) < 1e-12);
  }
}

TEST_CASE("axis-angle and quaternion round trips") {
  harness::Rng rng(16);
  for (int i = 0; i < 200; ++i) {
    const Rot3 r = rng.rotation();
    CHECK(is_rotation(r));
    CHECK(frob(from_axis_angle(to_axis_angle(r)), r) < 1e-9);
    CHECK(frob(from_quaternion_wxyz(to_quaternion_wxyz(r)), r) < 1e-12);
  }
  CHECK(!is_rotation(Mat3::Identity() * 2.0));
  CHECK(!is_rotation(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()));
}
