#include "kinsolve/so3.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "kinsolve/errors.hpp"

namespace kinsolve::so3 {

TwistAngle TwistAngle::from_radians(double phi) {
  return TwistAngle{std::cos(phi), std::sin(phi)};
}

TwistAngle TwistAngle::from_encoding(double c, double s) {
  const double n = std::hypot(c, s);
  if (n < kNormEps) raise(ErrorCode::ZeroVector, "twist encoding too close to (0, 0)");
  return TwistAngle{c / n, s / n};
}

double TwistAngle::radians() const { return std::atan2(sin_phi, cos_phi); }

Mat3 skew(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

Rot3 rodrigues(const Vec3& unit_axis, double cos_angle, double sin_angle) {
  const Mat3 k = skew(unit_axis);
  return Mat3::Identity() + sin_angle * k + (1.0 - cos_angle) * (k * k);
}

Vec3 any_perpendicular(const Vec3& v) {
  const Vec3 a = v.cwiseAbs();
  int least = 0;
  if (a.y() < a.x()) least = 1;
  if (a.z() < a(least)) least = 2;
  const Vec3 unit = v.normalized();
  const Vec3 axis = Vec3::Unit(least);
  return (axis - unit.dot(axis) * unit).normalized();
}

Rot3 swing_between(const Vec3& t, const Vec3& p) {
  const double nt = t.norm();
  const double np = p.norm();
  if (nt < kNormEps || np < kNormEps)
    raise(ErrorCode::ZeroVector, "swing_between needs nonzero directions");
  const Vec3 th = t / nt;
  const Vec3 ph = p / np;
  const Vec3 cross = th.cross(ph);
  const double sin_a = cross.norm();
  const double cos_a = th.dot(ph);
  if (sin_a < kParallelEps) {
    if (cos_a >= 0.0) return Rot3::Identity();
    return rodrigues(any_perpendicular(t), -1.0, 0.0);  // half turn
  }
  return rodrigues(cross / sin_a, cos_a, sin_a);
}

Rot3 twist_about(const Vec3& t, const TwistAngle& phi) {
  const double nt = t.norm();
  if (nt < kNormEps) raise(ErrorCode::ZeroVector, "twist axis too short");
  const Mat3 k = skew(t);
  return Mat3::Identity() + (phi.sin_phi / nt) * k + ((1.0 - phi.cos_phi) / (nt * nt)) * (k * k);
}

Rot3 twist_about(const Vec3& t, double phi) { return twist_about(t, TwistAngle::from_radians(phi)); }

Rot3 compose_twist_swing(const Rot3& swing, const Rot3& twist) { return swing * twist; }

TwistSwing extract_twist(const Rot3& r, const Vec3& t) {
  const double nt = t.norm();
  if (nt < kNormEps) raise(ErrorCode::ZeroVector, "twist axis too short");
  const Vec3 th = t / nt;
  const Vec3 rt = r * th;
  if (th.cross(rt).norm() < kParallelEps && th.dot(rt) < 0.0)
    raise(ErrorCode::Degenerate, "twist/swing split not unique for antiparallel rotation");

  const Rot3 swing = swing_between(t, r * t);
  const Mat3 tw = swing.transpose() * r;  // rotation about th
  const double c = std::clamp(0.5 * (tw.trace() - 1.0), -1.0, 1.0);
  const Vec3 w(tw(2, 1) - tw(1, 2), tw(0, 2) - tw(2, 0), tw(1, 0) - tw(0, 1));
  const double s = 0.5 * w.dot(th);
  return TwistSwing{swing, TwistAngle::from_encoding(c, s)};
}

std::array<double, 2> angle_encode(double phi) { return {std::cos(phi), std::sin(phi)}; }

double angle_decode(double c, double s) { return TwistAngle::from_encoding(c, s).radians(); }

AxisAngle to_axis_angle(const Rot3& r) {
  const Eigen::AngleAxisd aa(r);
  if (std::abs(aa.angle()) < 1e-14) return AxisAngle{Vec3::UnitX(), 0.0};
  return AxisAngle{aa.axis(), aa.angle()};
}

Rot3 from_axis_angle(const AxisAngle& aa) {
  const double n = aa.axis.norm();
  if (n < kNormEps) raise(ErrorCode::ZeroVector, "axis-angle axis too short");
  return rodrigues(aa.axis / n, std::cos(aa.angle), std::sin(aa.angle));
}

std::array<double, 4> to_quaternion_wxyz(const Rot3& r) {
  const Eigen::Quaterniond q(r);
  return {q.w(), q.x(), q.y(), q.z()};
}

Rot3 from_quaternion_wxyz(const std::array<double, 4>& q) {
  Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  const double n = quat.norm();
  if (n < kNormEps) raise(ErrorCode::ZeroVector, "zero quaternion");
  quat.normalize();
  return quat.toRotationMatrix();
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  return ortho < tol && std::abs(m.determinant() - 1.0) < tol;
}

}  // namespace kinsolve::so3
