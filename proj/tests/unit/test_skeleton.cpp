#include <doctest.h>

#include <kinsolve/errors.hpp>
#include <kinsolve/harness.hpp>
#include <kinsolve/skeleton.hpp>

#include <numbers>

#include "test_util.hpp"

using namespace kinsolve;

namespace {

SkeletonModel three_joint_chain() {
  SkeletonModel model;
  model.tree = KinematicTree::create({{"root", -1, SubtreeTag::Body},
                                      {"mid", 0, SubtreeTag::Body},
                                      {"tip", 1, SubtreeTag::Body}});
  model.rest.t = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  return model;
}

}  // namespace

TEST_CASE("builtin trees have the expected layout") {
  const SkeletonModel& body = builtin_tree("body24");
  CHECK(body.tree.joint_count() == 24);
  CHECK(body.tree.joint(0).name == "pelvis");
  CHECK(body.tree.is_root(0));

  const SkeletonModel& hand = builtin_tree("hand16");
  CHECK(hand.tree.joint_count() == 16);
  CHECK(hand.tree.joint(0).name == "wrist");
  CHECK(hand.tree.children(0).size() == 5);

  // 55 joints plus the two mouth markers.
  const SkeletonModel& whole = builtin_tree("wholebody");
  CHECK(whole.tree.joint_count() == 57);
  CHECK(whole.tree.find("jaw") == 22);
  CHECK(whole.tree.joint(whole.tree.find("mouth_top")).parent == whole.tree.find("head"));
  CHECK(whole.tree.joint(whole.tree.find("mouth_bottom")).parent == whole.tree.find("jaw"));

  // Hand sub-trees hang off the body wrists.
  CHECK(whole.tree.joint(whole.tree.find("left_index1")).parent == whole.tree.find("left_wrist"));
  CHECK(whole.tree.joint(whole.tree.find("right_index1")).parent ==
        whole.tree.find("right_wrist"));

  int body_n = 0, lh = 0, rh = 0, face = 0;
  for (const Joint& j : whole.tree.joints()) {
    switch (j.tag) {
      case SubtreeTag::Body: ++body_n; break;
      case SubtreeTag::LeftHand: ++lh; break;
      case SubtreeTag::RightHand: ++rh; break;
      case SubtreeTag::Face: ++face; break;
    }
  }
  CHECK(body_n == 22);
  CHECK(lh == 15);
  CHECK(rh == 15);
  CHECK(face == 5);

  for (const std::string& id : builtin_tree_ids()) {
    const SkeletonModel& model = builtin_tree(id);
    for (int k = 1; k < model.tree.joint_count(); ++k)
      CHECK(model.tree.parent(k) < k);
    CHECK_NOTHROW(validate_rest(model.tree, model.rest));
  }
  CHECK_THROWS_AS(builtin_tree("nope"), KinError);
}

TEST_CASE("fk with identity rotations is the identity map") {
  const SkeletonModel& model = builtin_tree("body24");
  const FkResult out = fk(model.tree, model.rest, identity_rotations(24));
  for (int k = 0; k < 24; ++k) CHECK((out.pose.q[k] - model.rest.t[k]).norm() < 1e-15);
}

TEST_CASE("fk rotates a chain rigidly through the root rotation") {
  const SkeletonModel model = three_joint_chain();
  RotationSet rots = identity_rotations(3);
  rots.rel[0] = test::rot_z(std::numbers::pi / 2);
  const FkResult out = fk(model.tree, model.rest, rots);
  CHECK((out.pose.q[0] - Vec3(0, 0, 0)).norm() < 1e-15);
  CHECK((out.pose.q[1] - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((out.pose.q[2] - Vec3(0, 2, 0)).norm() < 1e-15);
}

TEST_CASE("fk preserves bone lengths") {
  const SkeletonModel& model = builtin_tree("body24");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const harness::GeneratedPose gen = harness::generate_pose(model.tree, model.rest, seed);
    for (int k = 1; k < 24; ++k) {
      const double rest_len = bone(model.tree, model.rest, k).norm();
      const double posed_len = (gen.pose.q[k] - gen.pose.q[model.tree.parent(k)]).norm();
      CHECK(std::abs(posed_len - rest_len) < 1e-12 * rest_len);
    }
  }
}

TEST_CASE("fk is equivariant under root pre-rotation") {
  const SkeletonModel& model = builtin_tree("body24");
  harness::Rng rng(77);
  const harness::GeneratedPose gen = harness::generate_pose(model.tree, model.rest, 5);
  const Rot3 g = rng.rotation();

  RotationSet pre = gen.rots;
  pre.rel[0] = g * pre.rel[0];
  const FkResult a = fk(model.tree, model.rest, gen.rots);
  const FkResult b = fk(model.tree, model.rest, pre);
  for (int k = 0; k < 24; ++k)
    CHECK((b.pose.q[k] - b.pose.q[0] - g * (a.pose.q[k] - a.pose.q[0])).norm() < 1e-12);
}

TEST_CASE("fk rejects mismatched sizes") {
  const SkeletonModel& model = builtin_tree("body24");
  CHECK_THROWS_AS(fk(model.tree, model.rest, identity_rotations(10)), KinError);
}

TEST_CASE("ancestors walk root-first") {
  const SkeletonModel model = three_joint_chain();
  CHECK(model.tree.ancestors(2) == std::vector<int>{0, 1});
  CHECK(model.tree.ancestors(0).empty());

  const SkeletonModel& body = builtin_tree("body24");
  const std::vector<int> chain = body.tree.ancestors(body.tree.find("left_wrist"));
  auto contains = [&](const char* name) {
    const int idx = body.tree.find(name);
    return std::find(chain.begin(), chain.end(), idx) != chain.end();
  };
  CHECK(chain.front() == 0);  // pelvis first
  CHECK(contains("left_elbow"));
  CHECK(contains("left_shoulder"));
  CHECK(contains("left_collar"));
  CHECK(contains("spine1"));
  CHECK(contains("spine2"));
  CHECK(contains("spine3"));
}

TEST_CASE("bone vectors and the root error") {
  const SkeletonModel model = three_joint_chain();
  CHECK((bone(model.tree, model.rest, 1) - Vec3(1, 0, 0)).norm() == 0.0);
  CHECK_THROWS_AS(bone(model.tree, model.rest, 0), KinError);
}

TEST_CASE("tree creation rejects malformed input") {
  CHECK_THROWS_AS(KinematicTree::create({}), KinError);
  // parent after child
  CHECK_THROWS_AS(KinematicTree::create({{"a", -1, SubtreeTag::Body}, {"b", 2, SubtreeTag::Body},
                                         {"c", 0, SubtreeTag::Body}}),
                  KinError);
  // two roots
  CHECK_THROWS_AS(
      KinematicTree::create({{"a", -1, SubtreeTag::Body}, {"b", -1, SubtreeTag::Body}}),
      KinError);
  // duplicate names
  CHECK_THROWS_AS(
      KinematicTree::create({{"a", -1, SubtreeTag::Body}, {"a", 0, SubtreeTag::Body}}),
      KinError);

  SkeletonModel model = three_joint_chain();
  model.rest.t[1] = model.rest.t[0];  // zero bone
  CHECK_THROWS_AS(validate_rest(model.tree, model.rest), KinError);
}

TEST_CASE("eval_shape is linear in its coefficients") {
  const SkeletonModel model = three_joint_chain();
  SkeletonShapeBasis basis;
  basis.mean = model.rest;
  basis.shape_dirs = {{Vec3(0.1, 0, 0), Vec3(0.2, 0, 0), Vec3(0.3, 0, 0)},
                      {Vec3(0, 0.1, 0), Vec3(0, 0, 0), Vec3(0, -0.1, 0)}};
  basis.expr_dirs = {{Vec3(0, 0, 0.05), Vec3(0, 0, 0.05), Vec3(0, 0, 0.05)}};

  const std::vector<double> zero2 = {0.0, 0.0};
  const std::vector<double> zero1 = {0.0};
  const RestPose mean = eval_shape(basis, zero2, zero1);
  for (int k = 0; k < 3; ++k) CHECK((mean.t[k] - basis.mean.t[k]).norm() == 0.0);

  const std::vector<double> e1 = {1.0, 0.0};
  const RestPose first = eval_shape(basis, e1, zero1);
  for (int k = 0; k < 3; ++k)
    CHECK((first.t[k] - (basis.mean.t[k] + basis.shape_dirs[0][k])).norm() == 0.0);

  // 0.5 e1 + 0.5 e2 equals the average of the single-basis evaluations.
  const std::vector<double> half = {0.5, 0.5};
  const std::vector<double> e2 = {0.0, 1.0};
  const RestPose mixed = eval_shape(basis, half, zero1);
  const RestPose second = eval_shape(basis, e2, zero1);
  for (int k = 0; k < 3; ++k) {
    const Vec3 avg = 0.5 * (first.t[k] + second.t[k]);
    CHECK((mixed.t[k] - avg).norm() < 1e-15);
  }

  harness::Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), c = rng.uniform(-2, 2);
    const std::vector<double> beta = {a, b};
    const std::vector<double> psi = {c};
    const RestPose out = eval_shape(basis, beta, psi);
    for (int k = 0; k < 3; ++k) {
      const Vec3 expect = basis.mean.t[k] + a * basis.shape_dirs[0][k] +
                          b * basis.shape_dirs[1][k] + c * basis.expr_dirs[0][k];
      CHECK((out.t[k] - expect).norm() < 1e-15);
    }
  }

  const std::vector<double> wrong = {1.0};
  CHECK_THROWS_AS(eval_shape(basis, wrong, zero1), KinError);
}
