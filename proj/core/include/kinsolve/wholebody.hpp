#pragma once

#include <array>
#include <vector>

#include "kinsolve/solver.hpp"
#include "kinsolve/skeleton.hpp"

namespace kinsolve {

// Two-sphere projection problem behind the conflict-joint update: relocate a
// parent joint so both template bone lengths are honored while staying as
// close as possible to its predicted position.
//   a      reconstructed grandparent position
//   b      predicted parent position
//   c      predicted distal (conflict) joint position
//   len_pa template bone length grandparent -> parent
//   len_k  template bone length parent -> distal joint
struct BackwardUpdateProblem {
  Vec3 a;
  Vec3 b;
  Vec3 c;
  double len_pa = 0.0;
  double len_k = 0.0;
};

struct BackwardUpdate {
  Vec3 b_star;      // relocated parent position
  bool feasible;    // spheres intersect
  double residual;  // max violation of the two length constraints, meters
};

// Closed form when the spheres around a and c intersect:
//   m  = (len_pa^2 - len_k^2 + |ac|^2) / (2 |ac|^2)
//   n  = sqrt(len_pa^2 - m^2 |ac|^2)
//   b* = a + m*ac + n * db_perp / |db_perp|
// with db_perp the component of b - (a + m*ac) orthogonal to ac. When b lies
// on the ac line every circle point is optimal; a deterministic
// perpendicular is used. Disjoint spheres fall back to the collinear point
// minimizing the larger constraint violation, with m clamped to [0, 1], and
// report feasible = false. Raises CoincidentAC when |ac| vanishes.
BackwardUpdate backward_update(const BackwardUpdateProblem& prob);

struct ConflictResolution {
  Rot3 rel_parent;
  Rot3 rel_joint;
  Rot3 global_parent;
  Rot3 global_joint;
  Vec3 parent_pos;
  Vec3 joint_pos;
  bool feasible;
  double residual;
};

// Recomputes the rotations of a conflict joint and its parent so that FK
// through the relocated parent lands the conflict joint on its predicted
// position (exactly, in the feasible case). Both rotations are rebuilt by
// twist-and-swing using the supplied per-joint twists. Positions are in the
// solver's root-aligned frame.
ConflictResolution resolve_conflict(const KinematicTree& tree, const RestPose& rest,
                                    int conflict_joint, const Vec3& q_grandparent,
                                    const Rot3& grandparent_global, const Vec3& p_parent,
                                    const Vec3& p_conflict, const TwistAngles& twists);

// Template and predicted positions of the two mouth markers, plus the
// template pivot the jaw bone articulates about (the jaw's parent joint).
struct MarkerPair {
  Vec3 template_top;
  Vec3 template_bottom;
  Vec3 template_pivot;
  Vec3 predicted_top;
  Vec3 predicted_bottom;
};

// Swing-only jaw rotation from the mouth-opening vector (bottom - top). The
// prediction is expressed in the head frame so rigid head motion cancels,
// then re-anchored at the jaw pivot via the known template offset; any
// twist-free hinge of the jaw is recovered exactly.
Rot3 jaw_swing(const MarkerPair& markers, const Rot3& head_global);

// One kinematic sub-tree: `joints` are whole-body indices in topological
// order, starting with the sub-tree root. Non-body roots are the conflict
// joints and are tagged Body themselves (they belong to both slices).
struct SubtreeSlice {
  SubtreeTag tag;
  int root;
  std::vector<int> joints;
};

struct SubtreeSplit {
  std::array<SubtreeSlice, 4> slices;  // body, left hand, right hand, face

  const SubtreeSlice& slice(SubtreeTag tag) const;
};

// Splits a tagged whole-body tree into the body/hand/hand/face sub-trees.
// Raises SchemaError when a tag set is empty or has no unique entry joint.
SubtreeSplit split_subtrees(const KinematicTree& tree);

// Standalone model for one sub-tree slice; index_map[i] is the whole-body
// index of local joint i.
struct SubtreeModel {
  SkeletonModel model;
  std::vector<int> index_map;
};

SubtreeModel make_subtree_model(const KinematicTree& tree, const RestPose& rest,
                                const SubtreeSlice& slice);

struct WholebodyReport {
  SolveReport base;  // mode Wholebody; covers all joints of the tree

  struct Conflict {
    int joint;
    bool feasible;
    double residual;
  };
  std::vector<Conflict> conflicts;  // left wrist, right wrist, head

  SubtreeSplit subtrees;
};

// Whole-body solve: adaptive pass over the body sub-tree, backward update at
// each conflict joint (wrists, then head), then per-hand passes rooted at
// the resolved wrists: the wrist frame is registered from the metacarpal
// triplet, the palm triplet sits rigidly in that frame, and the fingers
// continue adaptively. The face gets a marker-driven jaw with identity
// rotations elsewhere. The target must cover all joints of the tree, mouth
// markers included.
WholebodyReport solve_wholebody(const KinematicTree& tree, const RestPose& rest,
                                const TargetPose& target, const TwistAngles& twists,
                                const MarkerPair& markers);

// Marker bundle for a whole-body tree whose predictions come from `target`.
MarkerPair make_marker_pair(const KinematicTree& tree, const RestPose& rest,
                            const TargetPose& target);

}  // namespace kinsolve
