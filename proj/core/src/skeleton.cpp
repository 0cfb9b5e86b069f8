#include "kinsolve/skeleton.hpp"

#include <algorithm>
#include <set>

#include "kinsolve/errors.hpp"

namespace kinsolve {

const char* subtree_tag_name(SubtreeTag tag) {
  switch (tag) {
    case SubtreeTag::Body: return "body";
    case SubtreeTag::LeftHand: return "left_hand";
    case SubtreeTag::RightHand: return "right_hand";
    case SubtreeTag::Face: return "face";
  }
  return "body";
}

SubtreeTag subtree_tag_from_name(std::string_view name) {
  if (name == "body") return SubtreeTag::Body;
  if (name == "left_hand") return SubtreeTag::LeftHand;
  if (name == "right_hand") return SubtreeTag::RightHand;
  if (name == "face") return SubtreeTag::Face;
  raise(ErrorCode::SchemaError, "unknown subtree tag '" + std::string(name) + "'");
}

KinematicTree KinematicTree::create(std::vector<Joint> joints, std::array<int, 3> root_triplet) {
  if (joints.empty()) raise(ErrorCode::SchemaError, "tree has no joints");
  const int k_count = static_cast<int>(joints.size());

  int roots = 0;
  std::set<std::string> names;
  for (int k = 0; k < k_count; ++k) {
    const Joint& j = joints[k];
    if (j.parent < 0) {
      ++roots;
      if (k != 0) raise(ErrorCode::SchemaError, "root joint must come first");
    } else if (j.parent >= k) {
      raise(ErrorCode::SchemaError,
            "joint '" + j.name + "' breaks topological order (parent index >= own index)");
    }
    if (!names.insert(j.name).second)
      raise(ErrorCode::SchemaError, "duplicate joint name '" + j.name + "'");
  }
  if (roots != 1) raise(ErrorCode::SchemaError, "tree must have exactly one root");

  KinematicTree tree;
  tree.joints_ = std::move(joints);
  tree.children_.resize(k_count);
  for (int k = 1; k < k_count; ++k) tree.children_[tree.joints_[k].parent].push_back(k);

  if (root_triplet[0] < 0 && tree.children_[0].size() >= 3) {
    for (int i = 0; i < 3; ++i) root_triplet[i] = tree.children_[0][i];
  }
  if (root_triplet[0] >= 0) {
    std::set<int> uniq;
    for (int idx : root_triplet) {
      if (idx <= 0 || idx >= k_count)
        raise(ErrorCode::SchemaError, "registration triplet index out of range");
      uniq.insert(idx);
    }
    if (uniq.size() != 3) raise(ErrorCode::SchemaError, "registration triplet must be distinct");
  }
  tree.root_triplet_ = root_triplet;
  return tree;
}

std::vector<int> KinematicTree::ancestors(int k) const {
  std::vector<int> out;
  for (int p = parent(k); p >= 0; p = parent(p)) out.push_back(p);
  std::reverse(out.begin(), out.end());
  return out;
}

int KinematicTree::find(std::string_view name) const {
  for (int k = 0; k < joint_count(); ++k)
    if (joints_[k].name == name) return k;
  return -1;
}

FkResult fk(const KinematicTree& tree, const RestPose& rest, const RotationSet& rots) {
  const int k_count = tree.joint_count();
  if (static_cast<int>(rest.t.size()) != k_count || static_cast<int>(rots.rel.size()) != k_count)
    raise(ErrorCode::DimensionMismatch, "fk inputs disagree on joint count");

  FkResult out;
  out.pose.q.resize(k_count);
  out.globals.resize(k_count);
  out.globals[0] = rots.rel[0];
  out.pose.q[0] = rest.t[0];
  for (int k = 1; k < k_count; ++k) {
    const int pa = tree.parent(k);
    out.globals[k] = out.globals[pa] * rots.rel[k];
    out.pose.q[k] = out.globals[k] * (rest.t[k] - rest.t[pa]) + out.pose.q[pa];
  }
  return out;
}

Vec3 bone(const KinematicTree& tree, const RestPose& rest, int k) {
  if (tree.is_root(k)) raise(ErrorCode::RootHasNoBone, "joint '" + tree.joint(k).name + "'");
  if (static_cast<int>(rest.t.size()) != tree.joint_count())
    raise(ErrorCode::DimensionMismatch, "rest pose size does not match tree");
  return rest.t[k] - rest.t[tree.parent(k)];
}

RestPose eval_shape(const SkeletonShapeBasis& basis, std::span<const double> beta,
                    std::span<const double> psi) {
  if (beta.size() != basis.shape_dirs.size() || psi.size() != basis.expr_dirs.size())
    raise(ErrorCode::DimensionMismatch, "coefficient counts do not match basis");
  RestPose out = basis.mean;
  for (size_t i = 0; i < beta.size(); ++i) {
    if (basis.shape_dirs[i].size() != out.t.size())
      raise(ErrorCode::DimensionMismatch, "shape direction size does not match mean");
    for (size_t k = 0; k < out.t.size(); ++k) out.t[k] += beta[i] * basis.shape_dirs[i][k];
  }
  for (size_t j = 0; j < psi.size(); ++j) {
    if (basis.expr_dirs[j].size() != out.t.size())
      raise(ErrorCode::DimensionMismatch, "expression direction size does not match mean");
    for (size_t k = 0; k < out.t.size(); ++k) out.t[k] += psi[j] * basis.expr_dirs[j][k];
  }
  return out;
}

void validate_rest(const KinematicTree& tree, const RestPose& rest) {
  if (static_cast<int>(rest.t.size()) != tree.joint_count())
    raise(ErrorCode::DimensionMismatch, "rest pose size does not match tree");
  for (const Vec3& t : rest.t)
    if (!t.allFinite()) raise(ErrorCode::SchemaError, "rest pose has non-finite coordinates");
  for (int k = 1; k < tree.joint_count(); ++k) {
    if (bone(tree, rest, k).norm() < so3::kNormEps)
      raise(ErrorCode::SchemaError, "zero-length bone at joint '" + tree.joint(k).name + "'");
  }
}

RotationSet identity_rotations(int joint_count) {
  RotationSet rots;
  rots.rel.assign(joint_count, Rot3::Identity());
  return rots;
}

}  // namespace kinsolve
