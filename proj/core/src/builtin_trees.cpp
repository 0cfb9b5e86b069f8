#include <mutex>

#include "kinsolve/errors.hpp"
#include "kinsolve/skeleton.hpp"

namespace kinsolve {

namespace {

struct JointSpec {
  const char* name;
  int parent;
  SubtreeTag tag;
  double x, y, z;  // rest position, meters
};

// Proportions of a ~1.7 m adult in a T-pose, pelvis at the origin, y up,
// x toward the left side, z forward.
constexpr JointSpec kBody24[] = {
    {"pelvis", -1, SubtreeTag::Body, 0.000, 0.000, 0.000},
    {"left_hip", 0, SubtreeTag::Body, 0.090, -0.085, 0.010},
    {"right_hip", 0, SubtreeTag::Body, -0.090, -0.085, 0.010},
    {"spine1", 0, SubtreeTag::Body, 0.000, 0.110, -0.010},
    {"left_knee", 1, SubtreeTag::Body, 0.100, -0.490, 0.005},
    {"right_knee", 2, SubtreeTag::Body, -0.100, -0.490, 0.005},
    {"spine2", 3, SubtreeTag::Body, 0.000, 0.245, -0.020},
    {"left_ankle", 4, SubtreeTag::Body, 0.095, -0.900, -0.020},
    {"right_ankle", 5, SubtreeTag::Body, -0.095, -0.900, -0.020},
    {"spine3", 6, SubtreeTag::Body, 0.000, 0.320, -0.010},
    {"left_foot", 7, SubtreeTag::Body, 0.110, -0.960, 0.110},
    {"right_foot", 8, SubtreeTag::Body, -0.110, -0.960, 0.110},
    {"neck", 9, SubtreeTag::Body, 0.000, 0.470, -0.015},
    {"left_collar", 9, SubtreeTag::Body, 0.075, 0.400, -0.010},
    {"right_collar", 9, SubtreeTag::Body, -0.075, 0.400, -0.010},
    {"head", 12, SubtreeTag::Body, 0.000, 0.560, 0.020},
    {"left_shoulder", 13, SubtreeTag::Body, 0.170, 0.440, -0.015},
    {"right_shoulder", 14, SubtreeTag::Body, -0.170, 0.440, -0.015},
    {"left_elbow", 16, SubtreeTag::Body, 0.430, 0.435, -0.025},
    {"right_elbow", 17, SubtreeTag::Body, -0.430, 0.435, -0.025},
    {"left_wrist", 18, SubtreeTag::Body, 0.675, 0.430, -0.020},
    {"right_wrist", 19, SubtreeTag::Body, -0.675, 0.430, -0.020},
    {"left_hand", 20, SubtreeTag::Body, 0.760, 0.425, -0.015},
    {"right_hand", 21, SubtreeTag::Body, -0.760, 0.425, -0.015},
};

// Single left hand, wrist at the origin; three segments per finger, digit
// order index / middle / pinky / ring / thumb.
constexpr JointSpec kHand16[] = {
    {"wrist", -1, SubtreeTag::Body, 0.000, 0.000, 0.000},
    {"index1", 0, SubtreeTag::Body, 0.083, 0.008, 0.030},
    {"index2", 1, SubtreeTag::Body, 0.119, 0.006, 0.034},
    {"index3", 2, SubtreeTag::Body, 0.147, 0.003, 0.036},
    {"middle1", 0, SubtreeTag::Body, 0.087, 0.010, 0.004},
    {"middle2", 4, SubtreeTag::Body, 0.129, 0.007, 0.005},
    {"middle3", 5, SubtreeTag::Body, 0.161, 0.003, 0.005},
    {"pinky1", 0, SubtreeTag::Body, 0.072, 0.003, -0.041},
    {"pinky2", 7, SubtreeTag::Body, 0.101, 0.000, -0.046},
    {"pinky3", 8, SubtreeTag::Body, 0.122, -0.003, -0.049},
    {"ring1", 0, SubtreeTag::Body, 0.081, 0.007, -0.019},
    {"ring2", 10, SubtreeTag::Body, 0.118, 0.004, -0.021},
    {"ring3", 11, SubtreeTag::Body, 0.147, 0.000, -0.023},
    {"thumb1", 0, SubtreeTag::Body, 0.028, -0.010, 0.042},
    {"thumb2", 13, SubtreeTag::Body, 0.062, -0.015, 0.068},
    {"thumb3", 14, SubtreeTag::Body, 0.090, -0.019, 0.088},
};

SkeletonModel make_model(const JointSpec* specs, int count, std::array<int, 3> triplet) {
  std::vector<Joint> joints;
  RestPose rest;
  joints.reserve(count);
  rest.t.reserve(count);
  for (int i = 0; i < count; ++i) {
    joints.push_back(Joint{specs[i].name, specs[i].parent, specs[i].tag});
    rest.t.emplace_back(specs[i].x, specs[i].y, specs[i].z);
  }
  SkeletonModel model{KinematicTree::create(std::move(joints), triplet), std::move(rest)};
  validate_rest(model.tree, model.rest);
  return model;
}

SkeletonModel make_body24() {
  // Registration triplet: spine1, left_hip, right_hip.
  return make_model(kBody24, 24, {3, 1, 2});
}

SkeletonModel make_hand16() {
  // Registration triplet: index/middle/pinky metacarpal heads.
  return make_model(kHand16, 16, {1, 4, 7});
}

SkeletonModel make_wholebody() {
  std::vector<Joint> joints;
  RestPose rest;

  // Body joints 0..21 (the 24-joint body without the hand leaf joints).
  for (int i = 0; i < 22; ++i) {
    joints.push_back(Joint{kBody24[i].name, kBody24[i].parent, SubtreeTag::Body});
    rest.t.emplace_back(kBody24[i].x, kBody24[i].y, kBody24[i].z);
  }

  const int head = 15;
  const int left_wrist = 20;
  const int right_wrist = 21;

  // Face: jaw and eyes attach to the head.
  joints.push_back(Joint{"jaw", head, SubtreeTag::Face});
  rest.t.emplace_back(0.000, 0.605, 0.045);
  joints.push_back(Joint{"left_eye", head, SubtreeTag::Face});
  rest.t.emplace_back(0.033, 0.645, 0.065);
  joints.push_back(Joint{"right_eye", head, SubtreeTag::Face});
  rest.t.emplace_back(-0.033, 0.645, 0.065);
  const int jaw = 22;

  // Fingers: hand16 offsets translated onto each wrist, x mirrored on the
  // right side. Parent indices shift from hand-local to whole-body indices.
  auto append_hand = [&](int wrist, double mirror, const char* prefix, SubtreeTag tag) {
    const int base = static_cast<int>(joints.size());
    const Vec3 wrist_pos = rest.t[wrist];
    for (int i = 1; i < 16; ++i) {
      const JointSpec& spec = kHand16[i];
      const int parent = spec.parent == 0 ? wrist : base + (spec.parent - 1);
      joints.push_back(Joint{std::string(prefix) + spec.name, parent, tag});
      rest.t.emplace_back(wrist_pos + Vec3(mirror * spec.x, spec.y, spec.z));
    }
  };
  append_hand(left_wrist, 1.0, "left_", SubtreeTag::LeftHand);
  append_hand(right_wrist, -1.0, "right_", SubtreeTag::RightHand);

  // Mouth markers: the top marker rides with the skull, the bottom one with
  // the jaw, so their separation measures mouth opening.
  joints.push_back(Joint{"mouth_top", head, SubtreeTag::Face});
  rest.t.emplace_back(0.000, 0.598, 0.088);
  joints.push_back(Joint{"mouth_bottom", jaw, SubtreeTag::Face});
  rest.t.emplace_back(0.000, 0.578, 0.083);

  SkeletonModel model{KinematicTree::create(std::move(joints), {3, 1, 2}), std::move(rest)};
  validate_rest(model.tree, model.rest);
  return model;
}

}  // namespace

const SkeletonModel& builtin_tree(std::string_view id) {
  static const SkeletonModel body24 = make_body24();
  static const SkeletonModel hand16 = make_hand16();
  static const SkeletonModel wholebody = make_wholebody();
  if (id == "body24") return body24;
  if (id == "hand16") return hand16;
  if (id == "wholebody") return wholebody;
  raise(ErrorCode::SchemaError, "unknown builtin tree '" + std::string(id) + "'");
}

std::vector<std::string> builtin_tree_ids() { return {"body24", "hand16", "wholebody"}; }

}  // namespace kinsolve
