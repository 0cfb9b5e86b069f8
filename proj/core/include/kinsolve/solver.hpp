#pragma once

#include <string>
#include <vector>

#include "kinsolve/skeleton.hpp"
#include "kinsolve/so3.hpp"

namespace kinsolve {

// Desired joint positions p_k, meters. p_0 anchors the translation: solvers
// work root-relative, so reported reconstructions keep the root at the rest
// template root.
struct TargetPose {
  std::vector<Vec3> p;
};

// Per-joint twist angles, index-aligned with the tree. Entry 0 (the root)
// is carried but never used; the root rotation comes from registration.
struct TwistAngles {
  std::vector<so3::TwistAngle> phi;
};

TwistAngles zero_twists(int joint_count);

// Ground-truth twists of a rotation set: per joint, the twist component of
// the relative rotation about the template bone.
TwistAngles extract_twists(const KinematicTree& tree, const RestPose& rest,
                           const RotationSet& rots);

// Root-relative template/target triplets for the global-rotation fit.
struct RegistrationProblem {
  std::array<Vec3, 3> template_triplet;
  std::array<Vec3, 3> target_triplet;
};

// Least-squares rotation aligning the template triplet to the target triplet
// (SVD of the 3x3 correlation, reflection-guarded so det is always +1).
// Raises DegenerateTriplet when the correlation matrix has rank < 2.
Rot3 register_root(const RegistrationProblem& prob);

enum class SolveMode { Naive, Adaptive, Wholebody };

const char* solve_mode_name(SolveMode mode);

struct SolveReport {
  SolveMode mode;
  RotationSet rots;
  Pose recon;                // fk(tree, rest, rots), root at the rest root
  std::vector<Rot3> globals;
  std::vector<Vec3> eps;     // per-step residual; zero at the root
  TargetPose aligned_target; // targets shifted so the root matches recon
};

// Naive solve: every step aims the template bone at the raw target bone
// p_k - p_pa(k), expressed in the parent's solved frame, then applies the
// supplied twist. Residuals accumulate along the chain.
SolveReport solve_naive(const KinematicTree& tree, const RestPose& rest,
                        const TargetPose& target, const TwistAngles& twists);

// Adaptive solve: each step aims at p_k - q_pa(k) using the reconstructed
// parent, so the per-joint residual stays local:
// ||p_k - q_k|| == | ||p_k - q_pa(k)|| - ||t_k - t_pa(k)|| |.
SolveReport solve_adaptive(const KinematicTree& tree, const RestPose& rest,
                           const TargetPose& target, const TwistAngles& twists);

// Variants with the global root rotation supplied instead of registered.
SolveReport solve_naive(const KinematicTree& tree, const RestPose& rest,
                        const TargetPose& target, const TwistAngles& twists,
                        const Rot3& root_rotation);
SolveReport solve_adaptive(const KinematicTree& tree, const RestPose& rest,
                           const TargetPose& target, const TwistAngles& twists,
                           const Rot3& root_rotation);

struct ErrorSplit {
  Vec3 accumulated;  // p_k - q_k
  Vec3 local;        // this step's residual eps_k
};

// Per-joint residual decomposition. For a naive report the accumulated term
// is the ancestor-plus-self sum of step residuals; for adaptive and
// whole-body reports the residual is already local.
std::vector<ErrorSplit> error_decomposition(const SolveReport& report, const KinematicTree& tree);

}  // namespace kinsolve
