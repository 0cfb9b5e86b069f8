#pragma once

#include <Eigen/Dense>

#include <array>

namespace kinsolve {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Rotations are stored as plain 3x3 matrices; every constructor in this
// module produces a proper rotation (orthogonal, det +1). JSON encoding is
// the 9 entries in row-major order.
using Rot3 = Mat3;

namespace so3 {

// Vectors shorter than this are treated as zero.
inline constexpr double kNormEps = 1e-10;
// sin(angle) below this between unit vectors counts as parallel/antiparallel.
inline constexpr double kParallelEps = 1e-8;
// Orthogonality / det gate for rotation validity checks.
inline constexpr double kRotTol = 1e-9;

struct AxisAngle {
  Vec3 axis;     // unit
  double angle;  // radians
};

// Twist angle kept as a point on the unit circle so downstream consumers
// never see a wrap discontinuity.
struct TwistAngle {
  double cos_phi = 1.0;
  double sin_phi = 0.0;

  static TwistAngle from_radians(double phi);
  // Renormalizes (c, s); raises ZeroVector near (0, 0).
  static TwistAngle from_encoding(double c, double s);

  double radians() const;
};

// [v]x, the matrix with skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

// Rodrigues form I + sin*K + (1-cos)*K^2 for a unit axis.
Rot3 rodrigues(const Vec3& unit_axis, double cos_angle, double sin_angle);

// Minimal rotation taking direction t to direction p; axis perpendicular to
// both. Antiparallel inputs get a half turn about a deterministic
// perpendicular axis; near-parallel inputs give the identity.
Rot3 swing_between(const Vec3& t, const Vec3& p);

// Rotation by phi about t itself (t need not be unit).
Rot3 twist_about(const Vec3& t, const TwistAngle& phi);
Rot3 twist_about(const Vec3& t, double phi);

// Product in the order swing * twist.
Rot3 compose_twist_swing(const Rot3& swing, const Rot3& twist);

struct TwistSwing {
  Rot3 swing;
  TwistAngle twist;
};

// Splits r into swing_between(t, r*t) and the residual twist about t.
// Raises Degenerate when r maps t to its antiparallel direction (the split
// is not unique there).
TwistSwing extract_twist(const Rot3& r, const Vec3& t);

std::array<double, 2> angle_encode(double phi);
double angle_decode(double c, double s);

AxisAngle to_axis_angle(const Rot3& r);
Rot3 from_axis_angle(const AxisAngle& aa);

// I/O conversion helpers only; no quaternion algebra lives here.
std::array<double, 4> to_quaternion_wxyz(const Rot3& r);
Rot3 from_quaternion_wxyz(const std::array<double, 4>& q);

bool is_rotation(const Mat3& m, double tol = kRotTol);

// Unit vector perpendicular to v: the coordinate axis least aligned with v,
// projected onto v's orthogonal plane. Deterministic tie-break for the
// antiparallel cases above.
Vec3 any_perpendicular(const Vec3& v);

}  // namespace so3
}  // namespace kinsolve
