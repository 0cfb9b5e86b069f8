#include <doctest.h>

#include <kinsolve/errors.hpp>
#include <kinsolve/harness.hpp>
#include <kinsolve/json_io.hpp>

#include <string>

using namespace kinsolve;

namespace {

std::string error_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const KinError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("skeleton JSON round trip preserves the builtin trees") {
  for (const std::string& id : builtin_tree_ids()) {
    const SkeletonModel& model = builtin_tree(id);
    const SkeletonModel loaded = load_skeleton_json(skeleton_to_json(model));
    REQUIRE(loaded.tree.joint_count() == model.tree.joint_count());
    for (int k = 0; k < model.tree.joint_count(); ++k) {
      CHECK(loaded.tree.joint(k).name == model.tree.joint(k).name);
      CHECK(loaded.tree.joint(k).parent == model.tree.joint(k).parent);
      CHECK(loaded.tree.joint(k).tag == model.tree.joint(k).tag);
      CHECK((loaded.rest.t[k] - model.rest.t[k]).norm() == 0.0);
    }
    CHECK(loaded.tree.root_triplet() == model.tree.root_triplet());
  }
}

TEST_CASE("skeleton schema errors carry pointer paths") {
  const std::string missing_rest = R"({"joints":[{"name":"a","parent":-1}]})";
  CHECK(error_message([&] { load_skeleton_json(missing_rest); }).find("/joints/0") !=
        std::string::npos);

  const std::string bad_rest = R"({"joints":[{"name":"a","parent":-1,"rest":[1,2]}]})";
  CHECK(error_message([&] { load_skeleton_json(bad_rest); }).find("/joints/0/rest") !=
        std::string::npos);

  const std::string unknown_key =
      R"({"joints":[{"name":"a","parent":-1,"rest":[0,0,0],"extra":1}]})";
  CHECK(error_message([&] { load_skeleton_json(unknown_key); }).find("extra") !=
        std::string::npos);
}

TEST_CASE("parse errors are line-precise") {
  const std::string broken = "{\n  \"joints\": [\n    {\"name\" \"a\"}\n  ]\n}\n";
  const std::string msg = error_message([&] { load_skeleton_json(broken); });
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("twist JSON accepts phi or cos_sin but not both") {
  const TwistAngles a = load_twists_json(R"({"phi":[0.0, 0.5, -0.25]})");
  REQUIRE(a.phi.size() == 3);
  CHECK(a.phi[1].radians() == doctest::Approx(0.5).epsilon(1e-12));

  const TwistAngles b = load_twists_json(R"({"cos_sin":[[1,0],[2,0]]})");  // unnormalized ok
  CHECK(b.phi[1].radians() == 0.0);

  CHECK_THROWS_AS(load_twists_json(R"({"phi":[0],"cos_sin":[[1,0]]})"), KinError);
  CHECK_THROWS_AS(load_twists_json(R"({})"), KinError);
  CHECK_THROWS_AS(load_twists_json(R"({"cos_sin":[[0,0]]})"), KinError);

  const TwistAngles round = load_twists_json(twists_to_json(a));
  for (size_t k = 0; k < a.phi.size(); ++k)
    CHECK(round.phi[k].radians() == doctest::Approx(a.phi[k].radians()).epsilon(1e-12));
}

TEST_CASE("rotation JSON is row-major and gated on validity") {
  const RotationSet rots = load_rotations_json(R"({"rotations":[[0,-1,0, 1,0,0, 0,0,1]]})");
  REQUIRE(rots.rel.size() == 1);
  CHECK(rots.rel[0](0, 1) == -1.0);
  CHECK(rots.rel[0](1, 0) == 1.0);

  CHECK_THROWS_AS(load_rotations_json(R"({"rotations":[[2,0,0, 0,1,0, 0,0,1]]})"), KinError);
  CHECK_THROWS_AS(load_rotations_json(R"({"rotations":[[1,0,0]]})"), KinError);

  const SkeletonModel& model = builtin_tree("body24");
  const harness::GeneratedPose gen = harness::generate_pose(model.tree, model.rest, 4);
  const RotationSet round = load_rotations_json(rotations_to_json(gen.rots));
  for (int k = 0; k < 24; ++k) CHECK((round.rel[k] - gen.rots.rel[k]).norm() < 1e-15);
}

TEST_CASE("target JSON with and without markers") {
  const TargetFile plain = load_target_json(R"({"joints":[[0,0,0],[1,0,0]]})");
  CHECK(plain.joints.p.size() == 2);
  CHECK(!plain.mouth_top.has_value());

  const TargetFile marked = load_target_json(
      R"({"joints":[[0,0,0]],"markers":{"mouth_top":[0,1,2],"mouth_bottom":[0,1,1.9]}})");
  REQUIRE(marked.mouth_top.has_value());
  CHECK((*marked.mouth_top - Vec3(0, 1, 2)).norm() == 0.0);

  CHECK_THROWS_AS(load_target_json(R"({"joints":[[0,0,0]],"markers":{"mouth_top":[0,1,2]}})"),
                  KinError);
}

TEST_CASE("shape basis JSON with inline and file-ref mean") {
  const std::string inline_basis = R"({
    "mean": [[0,0,0],[1,0,0]],
    "shape_dirs": [[[0.1,0,0],[0.2,0,0]]],
    "expr_dirs": []
  })";
  const SkeletonShapeBasis basis = load_shape_basis_json(inline_basis, ".");
  CHECK(basis.mean.t.size() == 2);
  CHECK(basis.shape_dirs.size() == 1);
  CHECK(basis.expr_dirs.empty());

  const std::string mismatched = R"({
    "mean": [[0,0,0],[1,0,0]],
    "shape_dirs": [[[0.1,0,0]]],
    "expr_dirs": []
  })";
  CHECK_THROWS_AS(load_shape_basis_json(mismatched, "."), KinError);
}

TEST_CASE("2.5D JSON validation") {
  const P25File ok = load_p25_json(R"({"uv":[[0,0],[0.1,0.2]],"d":[0,0.3],"s0":0.5})");
  CHECK(ok.s0 == 0.5);
  CHECK(ok.p25.uv.size() == 2);

  CHECK_THROWS_AS(load_p25_json(R"({"uv":[[0,0]],"d":[0.5]})"), KinError);   // root depth != 0
  CHECK_THROWS_AS(load_p25_json(R"({"uv":[[0,0]],"d":[0],"s0":-1})"), KinError);
  CHECK_THROWS_AS(load_p25_json(R"({"uv":[[0,0],[1,1]],"d":[0]})"), KinError);
}

TEST_CASE("bench config defaults and overrides") {
  const BenchConfig defaults = load_bench_config_json(R"({"seed": 7, "trials": 11})");
  CHECK(defaults.robustness.tree == "wholebody");
  CHECK(defaults.twist_ablation.tree == "body24");
  CHECK(defaults.camera.tree == "body24");
  CHECK(defaults.robustness.seed == 7);
  CHECK(defaults.camera.trials == 11);

  const BenchConfig split = load_bench_config_json(
      R"({"seed": 7, "trials": 11, "camera": {"trials": 3}, "robustness": {"jitter_mm": [0, 5]}})");
  CHECK(split.camera.trials == 3);
  CHECK(split.robustness.trials == 11);
  REQUIRE(split.robustness.jitter_mm.size() == 2);
  CHECK(split.robustness.jitter_mm[1] == 5.0);

  CHECK_THROWS_AS(load_bench_config_json(R"({"unknown": 1})"), KinError);
  CHECK_THROWS_AS(load_scenario_config_json(R"({"twist_mode":"sideways"})"), KinError);
}

TEST_CASE("solve report JSON carries rotations, residuals, and conflicts") {
  const SkeletonModel& model = builtin_tree("wholebody");
  const harness::GeneratedPose gen = harness::generate_pose(model.tree, model.rest, 31);
  const TargetPose target = harness::jitter(gen.pose, 5.0, 32);
  const MarkerPair markers = make_marker_pair(model.tree, model.rest, target);
  const WholebodyReport report =
      solve_wholebody(model.tree, model.rest, target, gen.twists, markers);

  const std::string json = wholebody_report_to_json(report, model.tree, true);
  CHECK(json.find("\"mode\": \"wholebody\"") != std::string::npos);
  CHECK(json.find("\"conflicts\"") != std::string::npos);
  CHECK(json.find("\"left_wrist\"") != std::string::npos);
  CHECK(json.find("\"subtree\"") != std::string::npos);
  CHECK(json.find("\"decomposition\"") != std::string::npos);

  const SkeletonModel& body24 = builtin_tree("body24");
  const harness::GeneratedPose body_gen = harness::generate_pose(body24.tree, body24.rest, 33);
  const SolveReport body =
      solve_adaptive(body24.tree, body24.rest, TargetPose{body_gen.pose.q}, body_gen.twists);
  const std::string body_json = report_to_json(body, body24.tree, false);
  CHECK(body_json.find("\"mode\": \"adaptive\"") != std::string::npos);
  CHECK(body_json.find("decomposition") == std::string::npos);
}
