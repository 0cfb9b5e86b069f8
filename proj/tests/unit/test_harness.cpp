#include <doctest.h>

#include <kinsolve/errors.hpp>
#include <kinsolve/harness.hpp>

#include <cstdlib>
#include <numbers>

#include "test_util.hpp"

using namespace kinsolve;
using namespace kinsolve::harness;

TEST_CASE("generate_pose is bit-deterministic for a fixed seed") {
  const SkeletonModel& model = builtin_tree("body24");
  const GeneratedPose a = generate_pose(model.tree, model.rest, 123);
  const GeneratedPose b = generate_pose(model.tree, model.rest, 123);
  for (int k = 0; k < 24; ++k) {
    CHECK((a.rots.rel[k] - b.rots.rel[k]).norm() == 0.0);
    CHECK((a.pose.q[k] - b.pose.q[k]).norm() == 0.0);
  }
  const GeneratedPose c = generate_pose(model.tree, model.rest, 124);
  CHECK((a.pose.q[5] - c.pose.q[5]).norm() > 0.0);
}

TEST_CASE("generated twists respect the configured limits") {
  const SkeletonModel& model = builtin_tree("body24");
  const std::vector<double> limits = default_twist_limits(model.tree);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GeneratedPose gen = generate_pose(model.tree, model.rest, seed);
    for (int k = 1; k < 24; ++k)
      CHECK(std::abs(gen.twists.phi[k].radians()) <= limits[k] + 1e-12);
  }

  GeneratorOptions tight;
  tight.twist_limits.assign(24, 0.05);
  const GeneratedPose gen = generate_pose(model.tree, model.rest, 7, tight);
  for (int k = 1; k < 24; ++k) CHECK(std::abs(gen.twists.phi[k].radians()) <= 0.05 + 1e-12);
}

TEST_CASE("default twist limits widen only at neck, elbow, and wrist") {
  const SkeletonModel& model = builtin_tree("body24");
  const std::vector<double> limits = default_twist_limits(model.tree);
  CHECK(limits[model.tree.find("neck")] == 1.2);
  CHECK(limits[model.tree.find("left_elbow")] == 1.2);
  CHECK(limits[model.tree.find("right_wrist")] == 1.2);
  CHECK(limits[model.tree.find("left_knee")] == 0.5);
  CHECK(limits[model.tree.find("spine2")] == 0.5);
}

TEST_CASE("generator twists re-fed to the adaptive solver reproduce the rotations") {
  const SkeletonModel& model = builtin_tree("body24");
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    const GeneratedPose gen = generate_pose(model.tree, model.rest, seed);
    const SolveReport report =
        solve_adaptive(model.tree, model.rest, TargetPose{gen.pose.q}, gen.twists);
    for (int k = 0; k < 24; ++k)
      CHECK((report.rots.rel[k] - gen.rots.rel[k]).norm() < 1e-9);
  }
}

TEST_CASE("jitter bounds and mean magnitude") {
  const SkeletonModel& model = builtin_tree("body24");
  const GeneratedPose gen = generate_pose(model.tree, model.rest, 3);

  const TargetPose zero = jitter(gen.pose, 0.0, 9);
  for (int k = 0; k < 24; ++k) CHECK((zero.p[k] - gen.pose.q[k]).norm() == 0.0);

  double mean_abs = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const TargetPose noisy = jitter(gen.pose, 10.0, seed);
    for (int k = 0; k < 24; ++k) {
      const Vec3 delta = noisy.p[k] - gen.pose.q[k];
      for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(delta[c]) <= 0.010);
        mean_abs += std::abs(delta[c]);
        ++count;
      }
    }
  }
  // Uniform on [-10mm, 10mm]: mean |delta| = 5mm, within 5%.
  mean_abs /= count;
  CHECK(mean_abs > 0.00475);
  CHECK(mean_abs < 0.00525);
}

TEST_CASE("robustness table orderings") {
  ScenarioConfig cfg;
  cfg.seed = 2024;
  cfg.tree = "wholebody";
  cfg.trials = 40;
  cfg.jitter_mm = {0.0, 10.0, 20.0};

  const BenchTable table = run_robustness(cfg);
  REQUIRE(table.rows.size() == 9);

  auto row = [&](const std::string& mode, double level) -> const BenchRow& {
    for (const BenchRow& r : table.rows)
      if (r.mode == mode && r.jitter_mm == level) return r;
    REQUIRE(false);
    return table.rows[0];
  };

  // Exact joints reconstruct exactly.
  CHECK(row("naive", 0.0).body_mpjpe_mm < 1e-6);
  CHECK(row("adaptive", 0.0).body_mpjpe_mm < 1e-6);
  CHECK(row("wholebody", 0.0).body_mpjpe_mm < 1e-6);
  CHECK(row("wholebody", 0.0).hand_mpjpe_mm < 1e-6);

  for (double level : {10.0, 20.0}) {
    CHECK(row("adaptive", level).body_mpjpe_mm < row("naive", level).body_mpjpe_mm);
    CHECK(row("wholebody", level).hand_mpjpe_mm <= row("adaptive", level).hand_mpjpe_mm);
  }
}

TEST_CASE("twist ablation: joints invariant, rotations ordered") {
  ScenarioConfig cfg;
  cfg.seed = 515;
  cfg.tree = "body24";
  cfg.trials = 40;

  const TwistAblationTable table = run_twist_ablation(cfg);
  REQUIRE(table.rows.size() == 3);
  double joint_err[3];
  double rot_err[3];
  for (int i = 0; i < 3; ++i) {
    joint_err[i] = table.rows[i].joint_mpjpe_mm;
    rot_err[i] = table.rows[i].rot_geodesic_deg;
  }
  CHECK(table.rows[0].mode == "gt");
  CHECK(table.rows[1].mode == "zero");
  CHECK(table.rows[2].mode == "random");

  for (int i = 0; i < 3; ++i) CHECK(joint_err[i] < 1e-6);
  CHECK(rot_err[0] < rot_err[1]);
  CHECK(rot_err[1] < rot_err[2]);
  CHECK(rot_err[0] < 1e-6);
}

TEST_CASE("camera bench improves with ICE steps and stays monotone") {
  ScenarioConfig cfg;
  cfg.seed = 808;
  cfg.tree = "body24";
  cfg.trials = 25;

  const CameraBenchTable table = run_camera_bench(cfg);
  REQUIRE(table.depth_err_mm.size() == 6);
  CHECK(table.depth_err_mm[0] > table.depth_err_mm[3]);
  CHECK(table.depth_err_mm[3] < 0.5 * table.depth_err_mm[0]);
  for (int t = 1; t < 6; ++t) {
    CHECK(table.depth_err_mm[t] <= table.depth_err_mm[t - 1] + 1e-9);
    CHECK(table.reproj_err_mmf1[t] <= table.reproj_err_mmf1[t - 1] + 1e-9);
  }
}

TEST_CASE("tables serialize byte-identically across runs") {
  ScenarioConfig cfg;
  cfg.seed = 99;
  cfg.tree = "wholebody";
  cfg.trials = 10;
  cfg.jitter_mm = {0.0, 10.0};

  const std::string a = to_csv(run_robustness(cfg));
  const std::string b = to_csv(run_robustness(cfg));
  CHECK(a == b);
  CHECK(a.find("#seed=99") != std::string::npos);
  CHECK(a.find("mode,jitter_mm,body_mpjpe_mm,hand_mpjpe_mm") != std::string::npos);

  const std::string stripped = strip_csv_comments(a);
  CHECK(stripped.find('#') == std::string::npos);
  CHECK(stripped.rfind("mode,", 0) == 0);
}

TEST_CASE("config validation") {
  ScenarioConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS_AS(validate_config(cfg, builtin_tree("body24").tree), KinError);
  cfg.trials = 5;
  cfg.jitter_mm = {-1.0};
  CHECK_THROWS_AS(validate_config(cfg, builtin_tree("body24").tree), KinError);
  cfg.jitter_mm = {0.0};
  cfg.twist_limits = {0.1, 0.2};
  CHECK_THROWS_AS(validate_config(cfg, builtin_tree("body24").tree), KinError);
}

TEST_CASE("tables are identical for any worker count") {
  ScenarioConfig cfg;
  cfg.seed = 321;
  cfg.tree = "wholebody";
  cfg.trials = 12;
  cfg.jitter_mm = {0.0, 15.0};

  setenv("KINSOLVE_THREADS", "1", 1);
  CHECK(thread_count() == 1);
  const std::string serial = to_csv(run_robustness(cfg));
  setenv("KINSOLVE_THREADS", "4", 1);
  CHECK(thread_count() == 4);
  const std::string threaded = to_csv(run_robustness(cfg));
  unsetenv("KINSOLVE_THREADS");
  CHECK(serial == threaded);
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 2, 4));
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 3));
  CHECK(mix_seed(1, 2, 3) != mix_seed(2, 2, 3));
  CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
}
