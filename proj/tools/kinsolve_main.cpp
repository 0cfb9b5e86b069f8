// kinsolve command-line tool: forward/inverse kinematics, whole-body solves,
// camera estimation, twist/swing decomposition, and benchmark tables over
// the JSON/CSV formats documented in the README.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include <kinsolve/camera.hpp>
#include <kinsolve/errors.hpp>
#include <kinsolve/harness.hpp>
#include <kinsolve/solver.hpp>
#include <kinsolve/wholebody.hpp>
#include <kinsolve/json_io.hpp>
#include <kinsolve/skeleton.hpp>
#include <kinsolve/version.hpp>

namespace {

using namespace kinsolve;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;

SkeletonModel resolve_tree(const std::string& value) {
  for (const std::string& id : builtin_tree_ids())
    if (value == id) return builtin_tree(id);
  return load_skeleton_json(read_text_file(value));
}

TwistAngles load_twists_for(const std::string& path, const KinematicTree& tree) {
  TwistAngles twists = load_twists_json(read_text_file(path));
  if (static_cast<int>(twists.phi.size()) != tree.joint_count())
    raise(ErrorCode::DimensionMismatch,
          "twist file provides " + std::to_string(twists.phi.size()) + " angles, tree has " +
              std::to_string(tree.joint_count()) + " joints");
  return twists;
}

// Assembles a whole-body target: either all joints inline, or the body part
// plus a markers object covering the trailing marker joints.
TargetPose assemble_wholebody_target(const SkeletonModel& model, TargetFile file,
                                     const std::optional<std::string>& marker_path) {
  const int k_count = model.tree.joint_count();
  if (marker_path) {
    const json j = json::parse(read_text_file(*marker_path));
    if (!j.contains("mouth_top") || !j.contains("mouth_bottom"))
      raise(ErrorCode::SchemaError, "marker file needs mouth_top and mouth_bottom");
    const auto top = j["mouth_top"].get<std::vector<double>>();
    const auto bottom = j["mouth_bottom"].get<std::vector<double>>();
    if (top.size() != 3 || bottom.size() != 3)
      raise(ErrorCode::SchemaError, "markers must be arrays of 3 numbers");
    file.mouth_top = Vec3(top[0], top[1], top[2]);
    file.mouth_bottom = Vec3(bottom[0], bottom[1], bottom[2]);
  }

  const int top_idx = model.tree.find("mouth_top");
  const int bottom_idx = model.tree.find("mouth_bottom");
  if (top_idx < 0 || bottom_idx < 0)
    raise(ErrorCode::SchemaError, "tree has no mouth_top/mouth_bottom joints");

  TargetPose target = file.joints;
  if (static_cast<int>(target.p.size()) == k_count - 2) {
    if (!file.mouth_top || !file.mouth_bottom)
      raise(ErrorCode::SchemaError,
            "target omits the mouth markers: provide a markers object or --markers file");
    if (top_idx != k_count - 2 || bottom_idx != k_count - 1)
      raise(ErrorCode::SchemaError, "marker joints must be the last two tree joints");
    target.p.push_back(*file.mouth_top);
    target.p.push_back(*file.mouth_bottom);
  } else if (static_cast<int>(target.p.size()) == k_count) {
    if (file.mouth_top) target.p[top_idx] = *file.mouth_top;
    if (file.mouth_bottom) target.p[bottom_idx] = *file.mouth_bottom;
  } else {
    raise(ErrorCode::DimensionMismatch,
          "target provides " + std::to_string(target.p.size()) + " joints, tree has " +
              std::to_string(k_count));
  }
  return target;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  for (char c : text + ",") {
    if (c == ',') {
      if (!token.empty()) out.push_back(std::stod(token));
      token.clear();
    } else {
      token += c;
    }
  }
  return out;
}

int run_fk(const std::string& tree_arg, const std::string& rots_path,
           const std::optional<std::string>& basis_path, const std::string& beta_csv,
           const std::string& psi_csv) {
  SkeletonModel model = resolve_tree(tree_arg);
  if (basis_path) {
    const std::string base_dir = std::filesystem::path(*basis_path).parent_path().string();
    const SkeletonShapeBasis basis =
        load_shape_basis_json(read_text_file(*basis_path), base_dir.empty() ? "." : base_dir);
    const std::vector<double> beta = parse_number_list(beta_csv);
    const std::vector<double> psi = parse_number_list(psi_csv);
    model.rest = eval_shape(basis, beta, psi);
    validate_rest(model.tree, model.rest);
  }
  RotationSet rots = load_rotations_json(read_text_file(rots_path));
  if (static_cast<int>(rots.rel.size()) != model.tree.joint_count())
    raise(ErrorCode::DimensionMismatch, "rotation count does not match tree");
  std::cout << fk_result_to_json(fk(model.tree, model.rest, rots));
  return kExitOk;
}

int run_ik(const std::string& tree_arg, const std::string& target_path,
           const std::string& twists_path, const std::string& mode, const std::string& emit) {
  const SkeletonModel model = resolve_tree(tree_arg);
  const TargetFile target = load_target_json(read_text_file(target_path));
  if (static_cast<int>(target.joints.p.size()) != model.tree.joint_count())
    raise(ErrorCode::DimensionMismatch,
          "target provides " + std::to_string(target.joints.p.size()) + " joints, tree has " +
              std::to_string(model.tree.joint_count()));
  const TwistAngles twists = load_twists_for(twists_path, model.tree);
  const bool residuals = emit == "residuals";

  const SolveReport report = mode == "naive"
                                 ? solve_naive(model.tree, model.rest, target.joints, twists)
                                 : solve_adaptive(model.tree, model.rest, target.joints, twists);
  std::cout << report_to_json(report, model.tree, residuals);
  return kExitOk;
}

int run_wholebody(const std::string& tree_arg, const std::string& target_path,
                  const std::string& twists_path, const std::optional<std::string>& marker_path,
                  const std::string& emit) {
  const SkeletonModel model = resolve_tree(tree_arg);
  const TargetFile file = load_target_json(read_text_file(target_path));
  const TargetPose target = assemble_wholebody_target(model, file, marker_path);
  const TwistAngles twists = load_twists_for(twists_path, model.tree);
  const MarkerPair markers = make_marker_pair(model.tree, model.rest, target);

  const WholebodyReport report =
      solve_wholebody(model.tree, model.rest, target, twists, markers);
  std::cout << wholebody_report_to_json(report, model.tree, emit == "residuals");
  return kExitOk;
}

int run_camera(const std::string& tree_arg, const std::string& p25_path,
               const std::string& twists_path, int steps,
               const std::optional<std::string>& trace_path, std::uint64_t seed) {
  const SkeletonModel model = resolve_tree(tree_arg);
  const P25File file = load_p25_json(read_text_file(p25_path));
  if (static_cast<int>(file.p25.uv.size()) != model.tree.joint_count())
    raise(ErrorCode::DimensionMismatch, "2.5D joint count does not match tree");
  const TwistAngles twists = load_twists_for(twists_path, model.tree);

  const bool wholebody = [&] {
    try {
      split_subtrees(model.tree);
      return model.tree.find("jaw") >= 0;
    } catch (const KinError&) {
      return false;
    }
  }();

  const SolveFn solver = [&](const TargetPose& joints) -> SolveReport {
    if (wholebody) {
      const MarkerPair markers = make_marker_pair(model.tree, model.rest, joints);
      return solve_wholebody(model.tree, model.rest, joints, twists, markers).base;
    }
    return solve_adaptive(model.tree, model.rest, joints, twists);
  };

  const IceResult result = ice(file.p25, CameraScale{file.s0}, solver, steps);

  if (trace_path) write_text_file(*trace_path, harness::ice_trace_csv(result.trace, seed));

  json trace = json::array();
  for (const IceTraceRow& row : result.trace)
    trace.push_back(json{{"step", row.step}, {"s", row.s}, {"reproj_err", row.reproj_err}});
  json joints = json::array();
  for (const Vec3& p : result.joints.p) joints.push_back(json::array({p.x(), p.y(), p.z()}));
  std::cout << json{{"s", result.s.s},
                    {"steps", steps},
                    {"joints", std::move(joints)},
                    {"trace", std::move(trace)}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int run_decompose(const std::optional<std::string>& tree_arg,
                  const std::optional<std::string>& rots_path,
                  const std::optional<std::string>& rotation_path, const std::string& axis_csv) {
  if (rotation_path) {
    const RotationSet rots = load_rotations_json(read_text_file(*rotation_path));
    if (rots.rel.size() != 1)
      raise(ErrorCode::SchemaError, "single-rotation mode expects exactly one rotation");
    const std::vector<double> axis = parse_number_list(axis_csv);
    if (axis.size() != 3) raise(ErrorCode::SchemaError, "--axis expects 'x,y,z'");
    const so3::TwistSwing split =
        so3::extract_twist(rots.rel[0], Vec3(axis[0], axis[1], axis[2]));
    json swing = json::array();
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) swing.push_back(split.swing(i, c));
    std::cout << json{{"swing", std::move(swing)},
                      {"phi", split.twist.radians()},
                      {"cos_sin", json::array({split.twist.cos_phi, split.twist.sin_phi})}}
                     .dump(2)
              << "\n";
    return kExitOk;
  }

  if (!tree_arg || !rots_path)
    raise(ErrorCode::SchemaError, "decompose needs either --rotation/--axis or --tree/--rots");
  const SkeletonModel model = resolve_tree(*tree_arg);
  const RotationSet rots = load_rotations_json(read_text_file(*rots_path));
  if (static_cast<int>(rots.rel.size()) != model.tree.joint_count())
    raise(ErrorCode::DimensionMismatch, "rotation count does not match tree");

  json phi = json::array();
  json swings = json::array();
  phi.push_back(0.0);
  json root = json::array();
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) root.push_back(rots.rel[0](i, c));
  swings.push_back(std::move(root));
  for (int k = 1; k < model.tree.joint_count(); ++k) {
    const so3::TwistSwing split =
        so3::extract_twist(rots.rel[k], bone(model.tree, model.rest, k));
    phi.push_back(split.twist.radians());
    json swing = json::array();
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) swing.push_back(split.swing(i, c));
    swings.push_back(std::move(swing));
  }
  std::cout << json{{"phi", std::move(phi)}, {"swings", std::move(swings)}}.dump(2) << "\n";
  return kExitOk;
}

int run_bench(const std::optional<std::string>& config_path, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed, const std::optional<int>& trials,
              const std::optional<std::string>& jitter_csv) {
  BenchConfig config;
  if (config_path) {
    config = load_bench_config_json(read_text_file(*config_path));
  } else {
    config.robustness.tree = "wholebody";
    config.twist_ablation.tree = "body24";
    config.camera.tree = "body24";
  }
  auto override_all = [&](auto&& fn) {
    fn(config.robustness);
    fn(config.twist_ablation);
    fn(config.camera);
  };
  if (seed) override_all([&](harness::ScenarioConfig& c) { c.seed = *seed; });
  if (trials) override_all([&](harness::ScenarioConfig& c) { c.trials = *trials; });
  if (jitter_csv) {
    const std::vector<double> levels = parse_number_list(*jitter_csv);
    override_all([&](harness::ScenarioConfig& c) { c.jitter_mm = levels; });
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create output directory '" + out_dir + "'");

  const std::filesystem::path dir(out_dir);
  write_text_file((dir / "robustness.csv").string(),
                  harness::to_csv(harness::run_robustness(config.robustness)));
  write_text_file((dir / "twist_ablation.csv").string(),
                  harness::to_csv(harness::run_twist_ablation(config.twist_ablation)));
  write_text_file((dir / "camera_bench.csv").string(),
                  harness::to_csv(harness::run_camera_bench(config.camera)));
  std::cerr << "wrote robustness.csv, twist_ablation.csv, camera_bench.csv to " << out_dir
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinsolve: analytical twist-and-swing inverse kinematics toolkit"};
  app.set_version_flag("--version", std::string("kinsolve ") + kinsolve::kVersion);
  app.require_subcommand(1);

  // fk
  auto* fk_cmd = app.add_subcommand("fk", "Forward kinematics: rotations to joint positions");
  std::string fk_tree, fk_rots, fk_beta, fk_psi;
  std::optional<std::string> fk_basis;
  fk_cmd->add_option("--tree", fk_tree, "Builtin tree id or skeleton JSON file")->required();
  fk_cmd->add_option("--rots", fk_rots, "Rotation set JSON file")->required();
  fk_cmd->add_option("--basis", fk_basis, "Shape basis JSON file (overrides the rest pose)");
  fk_cmd->add_option("--beta", fk_beta, "Shape coefficients, comma separated");
  fk_cmd->add_option("--psi", fk_psi, "Expression coefficients, comma separated");

  // ik
  auto* ik_cmd = app.add_subcommand("ik", "Body-level inverse kinematics");
  std::string ik_tree, ik_target, ik_twists, ik_mode = "adaptive", ik_emit;
  ik_cmd->add_option("--tree", ik_tree, "Builtin tree id or skeleton JSON file")->required();
  ik_cmd->add_option("--target", ik_target, "Target pose JSON file")->required();
  ik_cmd->add_option("--twists", ik_twists, "Twist angles JSON file")->required();
  ik_cmd->add_option("--mode", ik_mode, "naive or adaptive")
      ->check(CLI::IsMember({"naive", "adaptive"}));
  ik_cmd->add_option("--emit", ik_emit, "Extra payload: residuals")
      ->check(CLI::IsMember({"residuals"}));

  // wholebody
  auto* wb_cmd = app.add_subcommand("wholebody", "Whole-body solve with backward update");
  std::string wb_tree, wb_target, wb_twists, wb_emit;
  std::optional<std::string> wb_markers;
  wb_cmd->add_option("--tree", wb_tree, "Builtin tree id or skeleton JSON file")->required();
  wb_cmd->add_option("--target", wb_target, "Target pose JSON file")->required();
  wb_cmd->add_option("--twists", wb_twists, "Twist angles JSON file")->required();
  wb_cmd->add_option("--markers", wb_markers, "Mouth marker JSON file");
  wb_cmd->add_option("--emit", wb_emit, "Extra payload: residuals")
      ->check(CLI::IsMember({"residuals"}));

  // camera
  auto* cam_cmd = app.add_subcommand("camera", "Iterative camera estimation from 2.5D joints");
  std::string cam_tree, cam_p25, cam_twists;
  std::optional<std::string> cam_trace;
  int cam_steps = 3;
  std::uint64_t cam_seed = 0;
  cam_cmd->add_option("--tree", cam_tree, "Builtin tree id or skeleton JSON file")->required();
  cam_cmd->add_option("--p25", cam_p25, "2.5D joints JSON file")->required();
  cam_cmd->add_option("--twists", cam_twists, "Twist angles JSON file")->required();
  cam_cmd->add_option("--steps", cam_steps, "Refit iterations (default 3)");
  cam_cmd->add_option("--trace", cam_trace, "Write the ICE trace CSV to this file");
  cam_cmd->add_option("--seed", cam_seed, "Seed recorded in the trace metadata");

  // decompose
  auto* dec_cmd = app.add_subcommand("decompose", "Twist/swing split of rotations");
  std::optional<std::string> dec_tree, dec_rots, dec_rotation;
  std::string dec_axis;
  dec_cmd->add_option("--tree", dec_tree, "Builtin tree id or skeleton JSON file");
  dec_cmd->add_option("--rots", dec_rots, "Rotation set JSON file (per-joint mode)");
  dec_cmd->add_option("--rotation", dec_rotation, "Single rotation JSON file");
  dec_cmd->add_option("--axis", dec_axis, "Twist axis 'x,y,z' for single-rotation mode");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark tables");
  std::optional<std::string> bench_config, bench_jitter;
  std::string bench_out;
  std::optional<std::uint64_t> bench_seed;
  std::optional<int> bench_trials;
  bench_cmd->add_option("--config", bench_config, "Bench config JSON file");
  bench_cmd->add_option("--out", bench_out, "Output directory for the CSV tables")->required();
  bench_cmd->add_option("--seed", bench_seed, "Override the config seed");
  bench_cmd->add_option("--trials", bench_trials, "Override the trial count");
  bench_cmd->add_option("--jitter-mm", bench_jitter, "Override jitter levels, e.g. '0,10,20,30'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (fk_cmd->parsed()) return run_fk(fk_tree, fk_rots, fk_basis, fk_beta, fk_psi);
    if (ik_cmd->parsed()) return run_ik(ik_tree, ik_target, ik_twists, ik_mode, ik_emit);
    if (wb_cmd->parsed()) return run_wholebody(wb_tree, wb_target, wb_twists, wb_markers, wb_emit);
    if (cam_cmd->parsed())
      return run_camera(cam_tree, cam_p25, cam_twists, cam_steps, cam_trace, cam_seed);
    if (dec_cmd->parsed()) return run_decompose(dec_tree, dec_rots, dec_rotation, dec_axis);
    if (bench_cmd->parsed())
      return run_bench(bench_config, bench_out, bench_seed, bench_trials, bench_jitter);
  } catch (const kinsolve::KinError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_input_error() ? kExitInput : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
