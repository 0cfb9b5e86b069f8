#include "kinsolve/wholebody.hpp"

#include <algorithm>
#include <cmath>

#include "kinsolve/errors.hpp"

namespace kinsolve {

namespace {

// Tolerated relative undershoot of n^2 before a problem counts as infeasible
// (exact tangency lands at n^2 == 0 up to roundoff).
constexpr double kTangencyEps = 1e-12;

double constraint_violation(const BackwardUpdateProblem& prob, const Vec3& b_star) {
  const double va = std::abs((b_star - prob.a).norm() - prob.len_pa);
  const double vc = std::abs((prob.c - b_star).norm() - prob.len_k);
  return std::max(va, vc);
}

}  // namespace

BackwardUpdate backward_update(const BackwardUpdateProblem& prob) {
  if (!(prob.len_pa > 0.0) || !(prob.len_k > 0.0))
    raise(ErrorCode::ZeroBone, "backward update needs positive bone lengths");
  const Vec3 ac = prob.c - prob.a;
  const double d2 = ac.squaredNorm();
  if (d2 < so3::kNormEps * so3::kNormEps)
    raise(ErrorCode::CoincidentAC, "grandparent and distal joint coincide");
  const double d = std::sqrt(d2);

  const double m = (prob.len_pa * prob.len_pa - prob.len_k * prob.len_k + d2) / (2.0 * d2);
  const double n2 = prob.len_pa * prob.len_pa - m * m * d2;

  BackwardUpdate out;
  if (n2 >= -kTangencyEps * prob.len_pa * prob.len_pa) {
    const double n = std::sqrt(std::max(n2, 0.0));
    const Vec3 foot = prob.a + m * ac;
    const Vec3 db = prob.b - foot;
    const Vec3 db_perp = db - (db.dot(ac) / d2) * ac;
    const Vec3 dir =
        db_perp.norm() < so3::kNormEps ? so3::any_perpendicular(ac) : Vec3(db_perp.normalized());
    out.b_star = foot + n * dir;
    out.feasible = true;
  } else {
    // Spheres disjoint: collinear point balancing the two violations,
    // clamped to the a..c segment.
    const double m_clamped = std::clamp((d + prob.len_pa - prob.len_k) / (2.0 * d), 0.0, 1.0);
    out.b_star = prob.a + m_clamped * ac;
    out.feasible = false;
  }
  out.residual = constraint_violation(prob, out.b_star);
  return out;
}

ConflictResolution resolve_conflict(const KinematicTree& tree, const RestPose& rest,
                                    int conflict_joint, const Vec3& q_grandparent,
                                    const Rot3& grandparent_global, const Vec3& p_parent,
                                    const Vec3& p_conflict, const TwistAngles& twists) {
  const int pa = tree.parent(conflict_joint);
  if (pa <= 0)
    raise(ErrorCode::SchemaError,
          "conflict joint '" + tree.joint(conflict_joint).name + "' has no grandparent");
  const Vec3 bone_pa = bone(tree, rest, pa);
  const Vec3 bone_k = bone(tree, rest, conflict_joint);

  const BackwardUpdate bu = backward_update(
      BackwardUpdateProblem{q_grandparent, p_parent, p_conflict, bone_pa.norm(), bone_k.norm()});

  ConflictResolution res;
  res.feasible = bu.feasible;
  res.residual = bu.residual;

  const Vec3 aim_pa = grandparent_global.transpose() * (bu.b_star - q_grandparent);
  res.rel_parent = so3::compose_twist_swing(so3::swing_between(bone_pa, aim_pa),
                                            so3::twist_about(bone_pa, twists.phi[pa]));
  res.global_parent = grandparent_global * res.rel_parent;
  res.parent_pos = res.global_parent * bone_pa + q_grandparent;

  const Vec3 dir_k = p_conflict - res.parent_pos;
  if (dir_k.norm() < so3::kNormEps) {
    // Clamped collinear fallback can land the parent on the prediction; the
    // swing is then unconstrained, keep only the twist.
    res.rel_joint = so3::twist_about(bone_k, twists.phi[conflict_joint]);
  } else {
    const Vec3 aim_k = res.global_parent.transpose() * dir_k;
    res.rel_joint = so3::compose_twist_swing(so3::swing_between(bone_k, aim_k),
                                             so3::twist_about(bone_k, twists.phi[conflict_joint]));
  }
  res.global_joint = res.global_parent * res.rel_joint;
  res.joint_pos = res.global_joint * bone_k + res.parent_pos;
  return res;
}

Rot3 jaw_swing(const MarkerPair& markers, const Rot3& head_global) {
  if ((markers.template_bottom - markers.template_top).norm() < so3::kNormEps)
    raise(ErrorCode::ZeroVector, "coincident template markers");
  const Vec3 vp = markers.predicted_bottom - markers.predicted_top;
  if (vp.norm() < so3::kNormEps) raise(ErrorCode::ZeroVector, "coincident predicted markers");

  // Head-frame opening, re-anchored at the pivot: the top marker rides with
  // the skull, so its template offset to the pivot is rigid and cancels.
  const Vec3 opening_template = markers.template_bottom - markers.template_pivot;
  const Vec3 opening_predicted =
      head_global.transpose() * vp - (markers.template_pivot - markers.template_top);
  if (opening_template.norm() < so3::kNormEps || opening_predicted.norm() < so3::kNormEps)
    raise(ErrorCode::ZeroVector, "mouth opening collapses onto the jaw pivot");
  return so3::swing_between(opening_template, opening_predicted);
}

const SubtreeSlice& SubtreeSplit::slice(SubtreeTag tag) const {
  for (const SubtreeSlice& s : slices)
    if (s.tag == tag) return s;
  return slices[0];
}

SubtreeSplit split_subtrees(const KinematicTree& tree) {
  SubtreeSplit split;
  split.slices[0] = SubtreeSlice{SubtreeTag::Body, 0, {}};
  split.slices[1] = SubtreeSlice{SubtreeTag::LeftHand, -1, {}};
  split.slices[2] = SubtreeSlice{SubtreeTag::RightHand, -1, {}};
  split.slices[3] = SubtreeSlice{SubtreeTag::Face, -1, {}};

  auto slice_of = [&](SubtreeTag tag) -> SubtreeSlice& {
    for (SubtreeSlice& s : split.slices)
      if (s.tag == tag) return s;
    return split.slices[0];
  };

  // Find each non-body slice's entry: the unique joint whose parent carries a
  // different tag. That parent is the conflict joint serving as slice root.
  for (int k = 0; k < tree.joint_count(); ++k) {
    const SubtreeTag tag = tree.joint(k).tag;
    if (tag == SubtreeTag::Body) continue;
    const int pa = tree.parent(k);
    if (pa < 0) raise(ErrorCode::SchemaError, "non-body tag on the tree root");
    if (tree.joint(pa).tag == tag) continue;
    if (tree.joint(pa).tag != SubtreeTag::Body)
      raise(ErrorCode::SchemaError, "sub-tree '" + std::string(subtree_tag_name(tag)) +
                                        "' hangs off a non-body joint");
    SubtreeSlice& slice = slice_of(tag);
    if (slice.root >= 0 && slice.root != pa)
      raise(ErrorCode::SchemaError, "sub-tree '" + std::string(subtree_tag_name(tag)) +
                                        "' has more than one entry joint");
    slice.root = pa;
  }

  for (SubtreeSlice& slice : split.slices) {
    if (slice.tag != SubtreeTag::Body && slice.root < 0)
      raise(ErrorCode::SchemaError, std::string("tree has no '") + subtree_tag_name(slice.tag) +
                                        "' sub-tree");
    slice.joints.push_back(slice.root);
  }
  for (int k = 0; k < tree.joint_count(); ++k) {
    const SubtreeTag tag = tree.joint(k).tag;
    if (tag == SubtreeTag::Body) {
      if (k != 0) slice_of(SubtreeTag::Body).joints.push_back(k);
    } else {
      slice_of(tag).joints.push_back(k);
    }
  }
  return split;
}

SubtreeModel make_subtree_model(const KinematicTree& tree, const RestPose& rest,
                                const SubtreeSlice& slice) {
  SubtreeModel out;
  out.index_map = slice.joints;

  std::vector<int> local_of(tree.joint_count(), -1);
  for (size_t i = 0; i < slice.joints.size(); ++i) local_of[slice.joints[i]] = static_cast<int>(i);

  std::vector<Joint> joints;
  RestPose local_rest;
  for (size_t i = 0; i < slice.joints.size(); ++i) {
    const int k = slice.joints[i];
    Joint j = tree.joint(k);
    j.parent = (k == slice.root) ? -1 : local_of[tree.parent(k)];
    if (k != slice.root && j.parent < 0)
      raise(ErrorCode::SchemaError, "sub-tree slice is not closed under parents");
    joints.push_back(std::move(j));
    local_rest.t.push_back(rest.t[k]);
  }

  std::array<int, 3> triplet = {-1, -1, -1};
  if (slice.tag == SubtreeTag::Body) {
    const std::array<int, 3>& trip = tree.root_triplet();
    if (trip[0] >= 0 && local_of[trip[0]] >= 0 && local_of[trip[1]] >= 0 && local_of[trip[2]] >= 0)
      triplet = {local_of[trip[0]], local_of[trip[1]], local_of[trip[2]]};
  }
  out.model.tree = KinematicTree::create(std::move(joints), triplet);
  out.model.rest = std::move(local_rest);
  return out;
}

MarkerPair make_marker_pair(const KinematicTree& tree, const RestPose& rest,
                            const TargetPose& target) {
  const int top = tree.find("mouth_top");
  const int bottom = tree.find("mouth_bottom");
  const int jaw = tree.find("jaw");
  if (top < 0 || bottom < 0 || jaw < 0)
    raise(ErrorCode::SchemaError, "tree has no jaw/mouth_top/mouth_bottom joints");
  if (tree.is_root(jaw)) raise(ErrorCode::SchemaError, "jaw cannot be the tree root");
  if (static_cast<int>(target.p.size()) != tree.joint_count())
    raise(ErrorCode::DimensionMismatch, "target size does not match tree");
  // The jaw bone pivots about its parent joint; the opening vector is
  // re-anchored there.
  return MarkerPair{rest.t[top], rest.t[bottom], rest.t[tree.parent(jaw)], target.p[top],
                    target.p[bottom]};
}

WholebodyReport solve_wholebody(const KinematicTree& tree, const RestPose& rest,
                                const TargetPose& target, const TwistAngles& twists,
                                const MarkerPair& markers) {
  const int k_count = tree.joint_count();
  if (static_cast<int>(target.p.size()) != k_count)
    raise(ErrorCode::DimensionMismatch, "target size does not match tree");
  if (static_cast<int>(twists.phi.size()) != k_count)
    raise(ErrorCode::DimensionMismatch, "twist count does not match tree");

  WholebodyReport report;
  report.subtrees = split_subtrees(tree);
  const SubtreeSplit& split = report.subtrees;

  const int jaw = tree.find("jaw");
  if (jaw < 0) raise(ErrorCode::SchemaError, "whole-body tree has no 'jaw' joint");

  SolveReport& base = report.base;
  base.mode = SolveMode::Wholebody;
  base.aligned_target.p.resize(k_count);
  const Vec3 shift = rest.t[0] - target.p[0];
  for (int k = 0; k < k_count; ++k) base.aligned_target.p[k] = target.p[k] + shift;
  const TargetPose& p = base.aligned_target;

  base.rots.rel.assign(k_count, Rot3::Identity());
  base.globals.assign(k_count, Rot3::Identity());
  base.recon.q.assign(k_count, Vec3::Zero());
  base.eps.assign(k_count, Vec3::Zero());

  auto adaptive_step = [&](int k) {
    const int pa = tree.parent(k);
    const Vec3 bone_k = rest.t[k] - rest.t[pa];
    const Vec3 dir = p.p[k] - base.recon.q[pa];
    if (dir.norm() < so3::kNormEps)
      raise(ErrorCode::ZeroBone, "target bone collapses at joint '" + tree.joint(k).name + "'");
    const Vec3 local_dir = base.globals[pa].transpose() * dir;
    base.rots.rel[k] = so3::compose_twist_swing(so3::swing_between(bone_k, local_dir),
                                                so3::twist_about(bone_k, twists.phi[k]));
    base.globals[k] = base.globals[pa] * base.rots.rel[k];
    base.recon.q[k] = base.globals[k] * bone_k + base.recon.q[pa];
  };

  // Body pass.
  {
    RegistrationProblem prob;
    const std::array<int, 3>& trip = tree.root_triplet();
    if (trip[0] < 0) raise(ErrorCode::DegenerateTriplet, "tree provides no registration triplet");
    for (int i = 0; i < 3; ++i) {
      prob.template_triplet[i] = rest.t[trip[i]] - rest.t[0];
      prob.target_triplet[i] = p.p[trip[i]] - p.p[0];
    }
    base.rots.rel[0] = register_root(prob);
    base.globals[0] = base.rots.rel[0];
    base.recon.q[0] = rest.t[0];
    const SubtreeSlice& body = split.slice(SubtreeTag::Body);
    for (size_t i = 1; i < body.joints.size(); ++i) adaptive_step(body.joints[i]);
  }

  // Conflict joints: wrists first, then the head.
  auto resolve_at = [&](int cj) {
    const int pa = tree.parent(cj);
    const int pa2 = tree.parent(pa);
    const ConflictResolution res = resolve_conflict(
        tree, rest, cj, base.recon.q[pa2], base.globals[pa2], p.p[pa], p.p[cj], twists);
    base.rots.rel[pa] = res.rel_parent;
    base.globals[pa] = res.global_parent;
    base.recon.q[pa] = res.parent_pos;
    base.rots.rel[cj] = res.rel_joint;
    base.globals[cj] = res.global_joint;
    base.recon.q[cj] = res.joint_pos;
    report.conflicts.push_back(WholebodyReport::Conflict{cj, res.feasible, res.residual});
  };
  resolve_at(split.slice(SubtreeTag::LeftHand).root);
  resolve_at(split.slice(SubtreeTag::RightHand).root);
  resolve_at(split.slice(SubtreeTag::Face).root);

  // Hand passes: each hand is solved rooted at its resolved wrist. The palm
  // is one rigid segment: the wrist frame comes from registering the
  // metacarpal-head triplet (the wrist's first three hand children), and
  // those three joints then sit rigidly in that frame rather than chasing
  // their individual noisy targets. Fingers continue adaptively below.
  for (SubtreeTag tag : {SubtreeTag::LeftHand, SubtreeTag::RightHand}) {
    const SubtreeSlice& slice = split.slice(tag);
    const int wrist = slice.root;

    std::vector<int> palm;
    for (int child : tree.children(wrist))
      if (tree.joint(child).tag == tag && palm.size() < 3) palm.push_back(child);
    std::vector<bool> rigid(tree.joint_count(), false);
    if (palm.size() == 3) {
      RegistrationProblem prob;
      for (int i = 0; i < 3; ++i) {
        prob.template_triplet[i] = rest.t[palm[i]] - rest.t[wrist];
        prob.target_triplet[i] = p.p[palm[i]] - p.p[wrist];
        rigid[palm[i]] = true;
      }
      const Rot3 hand_global = register_root(prob);
      const int pa = tree.parent(wrist);
      base.rots.rel[wrist] = base.globals[pa].transpose() * hand_global;
      base.globals[wrist] = base.globals[pa] * base.rots.rel[wrist];
    }
    for (size_t i = 1; i < slice.joints.size(); ++i) {
      const int k = slice.joints[i];
      if (rigid[k]) {
        const int pa = tree.parent(k);
        base.rots.rel[k] = Rot3::Identity();
        base.globals[k] = base.globals[pa];
        base.recon.q[k] = base.globals[k] * (rest.t[k] - rest.t[pa]) + base.recon.q[pa];
      } else {
        adaptive_step(k);
      }
    }
  }

  // Face pass: marker-driven jaw, identity elsewhere (eyes, markers).
  {
    const SubtreeSlice& face = split.slice(SubtreeTag::Face);
    const Rot3 head_global = base.globals[face.root];
    for (size_t i = 1; i < face.joints.size(); ++i) {
      const int k = face.joints[i];
      const int pa = tree.parent(k);
      base.rots.rel[k] = (k == jaw) ? jaw_swing(markers, head_global) : Rot3::Identity();
      base.globals[k] = base.globals[pa] * base.rots.rel[k];
      base.recon.q[k] = base.globals[k] * (rest.t[k] - rest.t[pa]) + base.recon.q[pa];
    }
  }

  for (int k = 0; k < k_count; ++k) base.eps[k] = p.p[k] - base.recon.q[k];
  base.eps[0] = Vec3::Zero();
  return report;
}

}  // namespace kinsolve
