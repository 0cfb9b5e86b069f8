#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kinsolve/so3.hpp"

namespace kinsolve {

enum class SubtreeTag { Body, LeftHand, RightHand, Face };

const char* subtree_tag_name(SubtreeTag tag);
SubtreeTag subtree_tag_from_name(std::string_view name);

struct Joint {
  std::string name;
  int parent = -1;  // -1 marks the root
  SubtreeTag tag = SubtreeTag::Body;
};

// Joint hierarchy in topological order: joint 0 is the single root and every
// parent index precedes its children. Immutable once created.
class KinematicTree {
 public:
  // An empty tree; only create() produces a usable one.
  KinematicTree() = default;

  // Validates topology; triplet = joints used for root registration
  // ({-1,-1,-1} defers to the first three children of the root).
  static KinematicTree create(std::vector<Joint> joints,
                              std::array<int, 3> root_triplet = {-1, -1, -1});

  int joint_count() const { return static_cast<int>(joints_.size()); }
  const Joint& joint(int k) const { return joints_[k]; }
  const std::vector<Joint>& joints() const { return joints_; }

  int parent(int k) const { return joints_[k].parent; }
  bool is_root(int k) const { return joints_[k].parent < 0; }
  const std::vector<int>& children(int k) const { return children_[k]; }

  // Ancestor indices of k, root first, excluding k itself.
  std::vector<int> ancestors(int k) const;

  // Index of the named joint, -1 if absent.
  int find(std::string_view name) const;

  // Registration triplet; entries are -1 when the tree cannot provide one.
  const std::array<int, 3>& root_triplet() const { return root_triplet_; }

 private:
  std::vector<Joint> joints_;
  std::vector<std::vector<int>> children_;
  std::array<int, 3> root_triplet_{-1, -1, -1};
};

// Template joint positions t_k, meters.
struct RestPose {
  std::vector<Vec3> t;
};

// Per-joint relative rotations; entry 0 is the global root rotation.
struct RotationSet {
  std::vector<Rot3> rel;
};

// Reconstructed joint positions q_k, meters.
struct Pose {
  std::vector<Vec3> q;
};

struct SkeletonModel {
  KinematicTree tree;
  RestPose rest;
};

// Mean rest pose plus linear displacement bases for shape and expression
// coefficients.
struct SkeletonShapeBasis {
  RestPose mean;
  std::vector<std::vector<Vec3>> shape_dirs;
  std::vector<std::vector<Vec3>> expr_dirs;
};

struct FkResult {
  Pose pose;
  std::vector<Rot3> globals;
};

// Forward kinematics: q_0 = t_0, q_k = R_k (t_k - t_pa(k)) + q_pa(k) with
// R_k = R_pa(k) * rel_k. Returns the global rotations alongside the pose.
FkResult fk(const KinematicTree& tree, const RestPose& rest, const RotationSet& rots);

// Template bone vector t_k - t_pa(k); raises RootHasNoBone for the root.
Vec3 bone(const KinematicTree& tree, const RestPose& rest, int k);

RestPose eval_shape(const SkeletonShapeBasis& basis, std::span<const double> beta,
                    std::span<const double> psi);

// Requires every bone length strictly positive.
void validate_rest(const KinematicTree& tree, const RestPose& rest);

RotationSet identity_rotations(int joint_count);

// Built-in validated skeletons: a 24-joint body, a 16-joint single hand, and
// a 57-node whole body (55 joints plus the two mouth markers that drive the
// jaw). Rest poses are in meters.
const SkeletonModel& builtin_tree(std::string_view id);
std::vector<std::string> builtin_tree_ids();

}  // namespace kinsolve
