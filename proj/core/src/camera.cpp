#include "kinsolve/camera.hpp"

#include <cmath>

#include "kinsolve/errors.hpp"

namespace kinsolve {

namespace {

constexpr int kMaxIceSteps = 10;
constexpr int kMaxPolishSteps = 5;
constexpr double kIceEarlyExit = 1e-6;

Pose recentered(const Pose& pose) {
  Pose out = pose;
  const Vec3 root = out.q.empty() ? Vec3::Zero() : out.q[0];
  for (Vec3& q : out.q) q -= root;
  return out;
}

double rms_reprojection_error(const Pose& rel, CameraScale s, const std::vector<Vec2>& uv) {
  const std::vector<Vec2> proj = project_at_scale(rel, s, uv[0]);
  double acc = 0.0;
  for (size_t k = 0; k < uv.size(); ++k) acc += (proj[k] - uv[k]).squaredNorm();
  return std::sqrt(acc / static_cast<double>(uv.size()));
}

}  // namespace

void validate_p25(const Pose2p5D& p25) {
  if (p25.uv.size() != p25.d.size() || p25.uv.empty())
    raise(ErrorCode::DimensionMismatch, "2.5D uv/depth sizes disagree");
  if (std::abs(p25.d[0]) > 1e-12)
    raise(ErrorCode::SchemaError, "root relative depth must be zero");
  for (const Vec2& uv : p25.uv)
    if (!uv.allFinite()) raise(ErrorCode::NonFinite, "2.5D uv not finite");
  for (double d : p25.d)
    if (!std::isfinite(d)) raise(ErrorCode::NonFinite, "2.5D depth not finite");
}

TargetPose backproject(const Pose2p5D& p25, CameraScale s) {
  if (p25.uv.size() != p25.d.size())
    raise(ErrorCode::DimensionMismatch, "2.5D uv/depth sizes disagree");
  if (!(s.s > 0.0)) raise(ErrorCode::SchemaError, "scale must be positive");
  TargetPose out;
  out.p.resize(p25.uv.size());
  const double root_depth = 1.0 / s.s;
  for (size_t k = 0; k < p25.uv.size(); ++k) {
    const double z = root_depth + p25.d[k];
    if (z <= kDepthEps) raise(ErrorCode::BehindCamera, "joint depth not positive");
    out.p[k] = Vec3(p25.uv[k].x() * z, p25.uv[k].y() * z, z);
  }
  return out;
}

std::vector<Vec2> project(const TargetPose& pose) {
  std::vector<Vec2> out(pose.p.size());
  for (size_t k = 0; k < pose.p.size(); ++k) {
    const double z = pose.p[k].z();
    if (z <= kDepthEps) raise(ErrorCode::BehindCamera, "joint depth not positive");
    out[k] = Vec2(pose.p[k].x() / z, pose.p[k].y() / z);
  }
  return out;
}

std::vector<Vec2> project_at_scale(const Pose& root_relative, CameraScale s, const Vec2& root_uv) {
  if (!(s.s > 0.0)) raise(ErrorCode::SchemaError, "scale must be positive");
  const Pose rel = recentered(root_relative);
  const double root_depth = 1.0 / s.s;
  TargetPose abs;
  abs.p.resize(rel.q.size());
  for (size_t k = 0; k < rel.q.size(); ++k)
    abs.p[k] = Vec3(rel.q[k].x() + root_uv.x() * root_depth,
                    rel.q[k].y() + root_uv.y() * root_depth, rel.q[k].z() + root_depth);
  return project(abs);
}

double weak_perspective_scale(const Pose& root_relative, const std::vector<Vec2>& uv_obs) {
  if (root_relative.q.size() != uv_obs.size())
    raise(ErrorCode::DimensionMismatch, "pose/observation sizes disagree");
  if (root_relative.q.size() < 3)
    raise(ErrorCode::DimensionMismatch, "scale fit needs at least two non-root joints");
  const Pose rel = recentered(root_relative);

  double spread = 0.0;
  for (const Vec2& uv : uv_obs) spread = std::max(spread, (uv - uv_obs[0]).norm());
  if (spread < 1e-12) raise(ErrorCode::DegenerateObservation, "all observed uv coincide");

  double num = 0.0;
  double den = 0.0;
  for (size_t k = 1; k < rel.q.size(); ++k) {
    num += (uv_obs[k] - uv_obs[0]).dot(rel.q[k].head<2>());
    den += rel.q[k].head<2>().squaredNorm();
  }
  if (den < 1e-16) raise(ErrorCode::DegenerateObservation, "reconstruction has no lateral extent");
  return num / den;
}

CameraScale refit_scale(const Pose& recon_root_relative, const std::vector<Vec2>& uv_obs) {
  const Pose rel = recentered(recon_root_relative);
  double s = weak_perspective_scale(rel, uv_obs);
  if (!(s > 0.0)) s = 1e-6;

  // Gauss-Newton polish on the root depth. The root is anchored at the
  // observed root pixel: joint k sits at (x + u0 Z, y + v0 Z, z + Z).
  const Vec2 u0 = uv_obs[0];
  double depth = 1.0 / s;
  for (int iter = 0; iter < kMaxPolishSteps; ++iter) {
    double grad = 0.0;
    double curv = 0.0;
    bool valid = true;
    for (size_t k = 1; k < rel.q.size(); ++k) {
      const Vec3& q = rel.q[k];
      const double z = q.z() + depth;
      if (z <= kDepthEps) {
        valid = false;
        break;
      }
      const double u = (q.x() + u0.x() * depth) / z;
      const double v = (q.y() + u0.y() * depth) / z;
      const double du = (u0.x() * q.z() - q.x()) / (z * z);
      const double dv = (u0.y() * q.z() - q.y()) / (z * z);
      grad += (u - uv_obs[k].x()) * du + (v - uv_obs[k].y()) * dv;
      curv += du * du + dv * dv;
    }
    if (!valid || curv < 1e-30) break;
    double next = depth - grad / curv;
    if (next <= kDepthEps) next = 0.5 * (depth + kDepthEps);
    if (!std::isfinite(next)) break;
    const double delta = std::abs(next - depth);
    depth = next;
    if (delta < 1e-14 * depth) break;
  }
  if (!(depth > 0.0) || !std::isfinite(depth))
    raise(ErrorCode::NonFinite, "scale refit diverged");
  return CameraScale{1.0 / depth};
}

IceResult ice(const Pose2p5D& p25, CameraScale s0, const SolveFn& solver, int steps) {
  if (steps < 0) raise(ErrorCode::SchemaError, "ICE steps must be non-negative");
  validate_p25(p25);
  if (!(s0.s > 0.0)) raise(ErrorCode::SchemaError, "initial scale must be positive");
  const int capped = std::min(steps, kMaxIceSteps);

  IceResult out;
  double s = s0.s;
  for (int t = 0;; ++t) {
    const TargetPose joints = backproject(p25, CameraScale{s});
    const SolveReport report = solver(joints);
    for (const Vec3& q : report.recon.q)
      if (!q.allFinite()) raise(ErrorCode::NonFinite, "ICE reconstruction not finite");

    const Pose rel = recentered(report.recon);
    const CameraScale fitted = refit_scale(rel, p25.uv);
    if (!std::isfinite(fitted.s)) raise(ErrorCode::NonFinite, "ICE scale update not finite");
    out.trace.push_back(IceTraceRow{t, s, rms_reprojection_error(rel, fitted, p25.uv)});

    if (t == capped) {
      out.s = CameraScale{s};
      out.joints = joints;
      out.report = report;
      break;
    }
    if (std::abs(fitted.s - s) / s < kIceEarlyExit) {
      // Converged: the remaining iterates would not move the scale.
      out.s = CameraScale{s};
      out.joints = joints;
      out.report = report;
      break;
    }
    s = fitted.s;
  }
  return out;
}

}  // namespace kinsolve
