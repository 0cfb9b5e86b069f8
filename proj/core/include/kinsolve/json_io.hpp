#pragma once

#include <optional>
#include <string>

#include "kinsolve/camera.hpp"
#include "kinsolve/harness.hpp"
#include "kinsolve/solver.hpp"
#include "kinsolve/wholebody.hpp"
#include "kinsolve/skeleton.hpp"

namespace kinsolve {

// Strict JSON codecs for the on-disk formats. Parse errors report line and
// column; schema violations report a JSON-pointer-style path. Unknown keys
// are rejected.

// {"joints":[{"name","parent","rest":[x,y,z],"tag"?}...], "triplet"?:[i,j,k]}
SkeletonModel load_skeleton_json(const std::string& text);
std::string skeleton_to_json(const SkeletonModel& model);

// {"mean": [[x,y,z],...] | "rest-pose file path", "shape_dirs":[[[x,y,z],...],...],
//  "expr_dirs":[...]}; a file-ref mean resolves relative to base_dir.
SkeletonShapeBasis load_shape_basis_json(const std::string& text, const std::string& base_dir);

struct TargetFile {
  TargetPose joints;
  std::optional<Vec3> mouth_top;
  std::optional<Vec3> mouth_bottom;
};

// {"joints":[[x,y,z],...], "markers"?: {"mouth_top":[...], "mouth_bottom":[...]}}
TargetFile load_target_json(const std::string& text);
std::string target_to_json(const TargetPose& target);

// {"phi":[radians,...]} or {"cos_sin":[[c,s],...]}
TwistAngles load_twists_json(const std::string& text);
std::string twists_to_json(const TwistAngles& twists);

// {"rotations":[[9 numbers, row-major],...]}
RotationSet load_rotations_json(const std::string& text);
std::string rotations_to_json(const RotationSet& rots);

struct P25File {
  Pose2p5D p25;
  double s0 = 1.0;
};

// {"uv":[[u,v],...], "d":[...], "s0":number}
P25File load_p25_json(const std::string& text);

harness::ScenarioConfig load_scenario_config_json(const std::string& text);

struct BenchConfig {
  harness::ScenarioConfig robustness;
  harness::ScenarioConfig twist_ablation;
  harness::ScenarioConfig camera;
};

// Top-level scenario fields shared by all three tables, with optional
// per-table override sections "robustness", "twist_ablation", "camera".
// Default trees: wholebody / body24 / body24.
BenchConfig load_bench_config_json(const std::string& text);

std::string pose_to_json(const Pose& pose);
std::string fk_result_to_json(const FkResult& result);

std::string report_to_json(const SolveReport& report, const KinematicTree& tree,
                           bool emit_residuals);
std::string wholebody_report_to_json(const WholebodyReport& report, const KinematicTree& tree,
                                     bool emit_residuals);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kinsolve
