#pragma once

#include <functional>
#include <vector>

#include "kinsolve/solver.hpp"
#include "kinsolve/skeleton.hpp"

namespace kinsolve {

// Normalized image coordinates (focal length fixed at 1 m) plus root-relative
// depths; d[0] must be zero.
struct Pose2p5D {
  std::vector<Vec2> uv;
  std::vector<double> d;
};

// Weak-perspective scale factor; the implied root depth is 1/s.
struct CameraScale {
  double s = 1.0;
};

// Joints closer than this to the image plane count as behind the camera.
inline constexpr double kDepthEps = 1e-4;

void validate_p25(const Pose2p5D& p25);

// Perspective inversion at f = 1: z_k = 1/s + d_k, x_k = u_k z_k,
// y_k = v_k z_k. Raises BehindCamera when any z_k <= kDepthEps.
TargetPose backproject(const Pose2p5D& p25, CameraScale s);

// Plain perspective projection u = x/z, v = y/z of absolute 3D joints.
std::vector<Vec2> project(const TargetPose& pose);

// Projection of a root-relative pose placed at depth 1/s with the root
// anchored on the observed root pixel.
std::vector<Vec2> project_at_scale(const Pose& root_relative, CameraScale s, const Vec2& root_uv);

// Closed-form weak-perspective scale: with x root-relative and uv re-centered
// on the observed root, s = sum((u-u0)x + (v-v0)y) / sum(x^2 + y^2).
double weak_perspective_scale(const Pose& root_relative, const std::vector<Vec2>& uv_obs);

// Scale minimizing the full-perspective reprojection error of a root-relative
// reconstruction against the observed 2D joints: weak-perspective closed form
// above, then at most five Newton steps on the root depth. The root pixel is
// anchored, so the fit has exactly one scalar unknown. Needs at least two
// non-root joints; raises DegenerateObservation when the observations carry
// no lateral information.
CameraScale refit_scale(const Pose& recon_root_relative, const std::vector<Vec2>& uv_obs);

struct IceTraceRow {
  int step;
  double s;           // scale used to back-project this step
  double reproj_err;  // rms reprojection error of the step's reconstruction
};

struct IceResult {
  CameraScale s;
  TargetPose joints;  // back-projection at the returned scale
  SolveReport report; // solve on that back-projection
  std::vector<IceTraceRow> trace;
};

using SolveFn = std::function<SolveReport(const TargetPose&)>;

// Iterative camera estimation: back-project, solve, refit the scale, repeat.
// steps = 0 returns s0 untouched with a single back-projection and solve.
// Internally capped at 10 refits with early exit once |ds|/s < 1e-6.
IceResult ice(const Pose2p5D& p25, CameraScale s0, const SolveFn& solver, int steps);

}  // namespace kinsolve
