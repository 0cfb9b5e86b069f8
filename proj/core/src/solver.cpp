#include "kinsolve/solver.hpp"

#include <Eigen/SVD>

#include "kinsolve/errors.hpp"

namespace kinsolve {

namespace {

// Relative rank gate for the triplet correlation matrix.
constexpr double kTripletRankEps = 1e-10;

TargetPose root_align(const RestPose& rest, const TargetPose& target) {
  TargetPose aligned;
  aligned.p.resize(target.p.size());
  const Vec3 shift = rest.t[0] - target.p[0];
  for (size_t k = 0; k < target.p.size(); ++k) aligned.p[k] = target.p[k] + shift;
  return aligned;
}

RegistrationProblem root_problem(const KinematicTree& tree, const RestPose& rest,
                                 const TargetPose& aligned) {
  const std::array<int, 3>& trip = tree.root_triplet();
  if (trip[0] < 0)
    raise(ErrorCode::DegenerateTriplet, "tree provides no registration triplet");
  RegistrationProblem prob;
  for (int i = 0; i < 3; ++i) {
    prob.template_triplet[i] = rest.t[trip[i]] - rest.t[0];
    prob.target_triplet[i] = aligned.p[trip[i]] - aligned.p[0];
  }
  return prob;
}

SolveReport solve_core(const KinematicTree& tree, const RestPose& rest, const TargetPose& target,
                       const TwistAngles& twists, bool adaptive, const Rot3* root_rotation) {
  const int k_count = tree.joint_count();
  if (static_cast<int>(target.p.size()) != k_count)
    raise(ErrorCode::DimensionMismatch, "target size does not match tree");
  if (static_cast<int>(twists.phi.size()) != k_count)
    raise(ErrorCode::DimensionMismatch, "twist count does not match tree");
  for (const Vec3& p : target.p)
    if (!p.allFinite()) raise(ErrorCode::NonFinite, "target contains non-finite coordinates");

  SolveReport report;
  report.mode = adaptive ? SolveMode::Adaptive : SolveMode::Naive;
  report.aligned_target = root_align(rest, target);
  const TargetPose& p = report.aligned_target;

  report.rots.rel.resize(k_count);
  report.globals.resize(k_count);
  report.recon.q.resize(k_count);
  report.eps.assign(k_count, Vec3::Zero());

  report.rots.rel[0] =
      root_rotation ? *root_rotation : register_root(root_problem(tree, rest, p));
  report.globals[0] = report.rots.rel[0];
  report.recon.q[0] = rest.t[0];

  for (int k = 1; k < k_count; ++k) {
    const int pa = tree.parent(k);
    const Vec3 bone_k = rest.t[k] - rest.t[pa];
    const Vec3 anchor = adaptive ? report.recon.q[pa] : p.p[pa];
    const Vec3 dir = p.p[k] - anchor;
    if (dir.norm() < so3::kNormEps)
      raise(ErrorCode::ZeroBone, "target bone collapses at joint '" + tree.joint(k).name + "'");

    const Vec3 local_dir = report.globals[pa].transpose() * dir;
    report.rots.rel[k] = so3::compose_twist_swing(so3::swing_between(bone_k, local_dir),
                                                  so3::twist_about(bone_k, twists.phi[k]));
    report.globals[k] = report.globals[pa] * report.rots.rel[k];
    report.recon.q[k] = report.globals[k] * bone_k + report.recon.q[pa];
    report.eps[k] = adaptive ? Vec3(p.p[k] - report.recon.q[k])
                             : Vec3(p.p[k] - p.p[pa] - report.globals[k] * bone_k);
  }
  return report;
}

}  // namespace

TwistAngles zero_twists(int joint_count) {
  TwistAngles out;
  out.phi.assign(joint_count, so3::TwistAngle{});
  return out;
}

TwistAngles extract_twists(const KinematicTree& tree, const RestPose& rest,
                           const RotationSet& rots) {
  const int k_count = tree.joint_count();
  if (static_cast<int>(rots.rel.size()) != k_count)
    raise(ErrorCode::DimensionMismatch, "rotation count does not match tree");
  TwistAngles out = zero_twists(k_count);
  for (int k = 1; k < k_count; ++k)
    out.phi[k] = so3::extract_twist(rots.rel[k], bone(tree, rest, k)).twist;
  return out;
}

Rot3 register_root(const RegistrationProblem& prob) {
  Mat3 t0, p0;
  for (int i = 0; i < 3; ++i) {
    t0.col(i) = prob.template_triplet[i];
    p0.col(i) = prob.target_triplet[i];
  }
  const Mat3 corr = t0 * p0.transpose();
  Eigen::JacobiSVD<Mat3> svd(corr, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  if (sigma(1) <= kTripletRankEps * std::max(sigma(0), 1e-30) || sigma(0) < 1e-30)
    raise(ErrorCode::DegenerateTriplet, "triplet correlation has rank < 2");

  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 fix = Mat3::Identity();
  fix(2, 2) = ((v * u.transpose()).determinant() > 0.0) ? 1.0 : -1.0;
  return v * fix * u.transpose();
}

const char* solve_mode_name(SolveMode mode) {
  switch (mode) {
    case SolveMode::Naive: return "naive";
    case SolveMode::Adaptive: return "adaptive";
    case SolveMode::Wholebody: return "wholebody";
  }
  return "naive";
}

SolveReport solve_naive(const KinematicTree& tree, const RestPose& rest, const TargetPose& target,
                        const TwistAngles& twists) {
  return solve_core(tree, rest, target, twists, false, nullptr);
}

SolveReport solve_adaptive(const KinematicTree& tree, const RestPose& rest,
                           const TargetPose& target, const TwistAngles& twists) {
  return solve_core(tree, rest, target, twists, true, nullptr);
}

SolveReport solve_naive(const KinematicTree& tree, const RestPose& rest, const TargetPose& target,
                        const TwistAngles& twists, const Rot3& root_rotation) {
  return solve_core(tree, rest, target, twists, false, &root_rotation);
}

SolveReport solve_adaptive(const KinematicTree& tree, const RestPose& rest,
                           const TargetPose& target, const TwistAngles& twists,
                           const Rot3& root_rotation) {
  return solve_core(tree, rest, target, twists, true, &root_rotation);
}

std::vector<ErrorSplit> error_decomposition(const SolveReport& report, const KinematicTree& tree) {
  const int k_count = tree.joint_count();
  std::vector<ErrorSplit> out(k_count);
  out[0] = ErrorSplit{Vec3::Zero(), Vec3::Zero()};
  for (int k = 1; k < k_count; ++k) {
    out[k].local = report.eps[k];
    if (report.mode == SolveMode::Naive) {
      out[k].accumulated = out[tree.parent(k)].accumulated + report.eps[k];
    } else {
      out[k].accumulated = report.aligned_target.p[k] - report.recon.q[k];
    }
  }
  return out;
}

}  // namespace kinsolve
