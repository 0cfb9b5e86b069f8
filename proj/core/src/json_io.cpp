#include "kinsolve/json_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kinsolve/errors.hpp"

namespace kinsolve {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert it to line/column.
    size_t line = 1;
    size_t col = 1;
    const size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    raise(ErrorCode::SchemaError, "parse error at line " + std::to_string(line) + ", column " +
                                      std::to_string(col) + ": " + e.what());
  }
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
  raise(ErrorCode::SchemaError, path + ": " + msg);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  for (const char* key : required)
    if (!j.contains(key)) schema_fail(path, std::string("missing required key '") + key + "'");
  std::set<std::string> known;
  for (const char* key : required) known.insert(key);
  for (const char* key : optional) known.insert(key);
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) schema_fail(path + "/" + key, "unknown key");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_fail(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string");
  return j.get<std::string>();
}

Vec3 get_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) schema_fail(path, "expected an array of 3 numbers");
  return Vec3(get_number(j[0], path + "/0"), get_number(j[1], path + "/1"),
              get_number(j[2], path + "/2"));
}

Vec2 get_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "expected an array of 2 numbers");
  return Vec2(get_number(j[0], path + "/0"), get_number(j[1], path + "/1"));
}

std::vector<Vec3> get_vec3_list(const json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "expected an array");
  std::vector<Vec3> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(get_vec3(j[i], path + "/" + std::to_string(i)));
  return out;
}

Rot3 get_rotation(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 9) schema_fail(path, "expected an array of 9 numbers (row-major)");
  Rot3 r;
  for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = get_number(j[i], path + "/" + std::to_string(i));
  if (!so3::is_rotation(r))
    schema_fail(path, "matrix is not a rotation (orthogonality/determinant gate 1e-9)");
  return r;
}

json rotation_to_json(const Rot3& r) {
  json out = json::array();
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) out.push_back(r(i, c));
  return out;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json vec3_list_to_json(const std::vector<Vec3>& v) {
  json out = json::array();
  for (const Vec3& x : v) out.push_back(vec3_to_json(x));
  return out;
}

void fill_scenario(const json& j, const std::string& path, harness::ScenarioConfig& cfg) {
  check_keys(j, path, {},
             {"seed", "tree", "trials", "jitter_mm", "twist_mode", "twist_limits"});
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      schema_fail(path + "/seed", "expected an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tree")) cfg.tree = get_string(j["tree"], path + "/tree");
  if (j.contains("trials")) cfg.trials = get_int(j["trials"], path + "/trials");
  if (j.contains("jitter_mm")) {
    if (!j["jitter_mm"].is_array()) schema_fail(path + "/jitter_mm", "expected an array");
    cfg.jitter_mm.clear();
    for (size_t i = 0; i < j["jitter_mm"].size(); ++i)
      cfg.jitter_mm.push_back(
          get_number(j["jitter_mm"][i], path + "/jitter_mm/" + std::to_string(i)));
  }
  if (j.contains("twist_mode"))
    cfg.twist_mode =
        harness::twist_mode_from_name(get_string(j["twist_mode"], path + "/twist_mode"));
  if (j.contains("twist_limits")) {
    if (!j["twist_limits"].is_array()) schema_fail(path + "/twist_limits", "expected an array");
    cfg.twist_limits.clear();
    for (size_t i = 0; i < j["twist_limits"].size(); ++i)
      cfg.twist_limits.push_back(
          get_number(j["twist_limits"][i], path + "/twist_limits/" + std::to_string(i)));
  }
}

}  // namespace

SkeletonModel load_skeleton_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, "", {"joints"}, {"triplet"});
  if (!j["joints"].is_array() || j["joints"].empty())
    schema_fail("/joints", "expected a non-empty array");

  std::vector<Joint> joints;
  RestPose rest;
  for (size_t i = 0; i < j["joints"].size(); ++i) {
    const std::string path = "/joints/" + std::to_string(i);
    const json& jj = j["joints"][i];
    check_keys(jj, path, {"name", "parent", "rest"}, {"tag"});
    Joint joint;
    joint.name = get_string(jj["name"], path + "/name");
    joint.parent = get_int(jj["parent"], path + "/parent");
    joint.tag = jj.contains("tag")
                    ? subtree_tag_from_name(get_string(jj["tag"], path + "/tag"))
                    : SubtreeTag::Body;
    joints.push_back(std::move(joint));
    rest.t.push_back(get_vec3(jj["rest"], path + "/rest"));
  }

  std::array<int, 3> triplet = {-1, -1, -1};
  if (j.contains("triplet")) {
    if (!j["triplet"].is_array() || j["triplet"].size() != 3)
      schema_fail("/triplet", "expected an array of 3 joint indices");
    for (int i = 0; i < 3; ++i) triplet[i] = get_int(j["triplet"][i], "/triplet");
  }

  SkeletonModel model{KinematicTree::create(std::move(joints), triplet), std::move(rest)};
  validate_rest(model.tree, model.rest);
  return model;
}

std::string skeleton_to_json(const SkeletonModel& model) {
  json joints = json::array();
  for (int k = 0; k < model.tree.joint_count(); ++k) {
    const Joint& joint = model.tree.joint(k);
    joints.push_back(json{{"name", joint.name},
                          {"parent", joint.parent},
                          {"rest", vec3_to_json(model.rest.t[k])},
                          {"tag", subtree_tag_name(joint.tag)}});
  }
  json out{{"joints", std::move(joints)}};
  if (model.tree.root_triplet()[0] >= 0) {
    const std::array<int, 3>& trip = model.tree.root_triplet();
    out["triplet"] = json::array({trip[0], trip[1], trip[2]});
  }
  return out.dump(2) + "\n";
}

SkeletonShapeBasis load_shape_basis_json(const std::string& text, const std::string& base_dir) {
  const json j = parse(text);
  check_keys(j, "", {"mean", "shape_dirs", "expr_dirs"});

  SkeletonShapeBasis basis;
  if (j["mean"].is_string()) {
    const std::filesystem::path ref =
        std::filesystem::path(base_dir) / j["mean"].get<std::string>();
    const json mean = parse(read_text_file(ref.string()));
    check_keys(mean, "(mean file)", {"joints"});
    basis.mean.t = get_vec3_list(mean["joints"], "(mean file)/joints");
  } else {
    basis.mean.t = get_vec3_list(j["mean"], "/mean");
  }

  auto load_dirs = [&](const char* key) {
    const json& dirs = j[key];
    if (!dirs.is_array()) schema_fail(std::string("/") + key, "expected an array");
    std::vector<std::vector<Vec3>> out;
    for (size_t i = 0; i < dirs.size(); ++i) {
      std::vector<Vec3> dir =
          get_vec3_list(dirs[i], std::string("/") + key + "/" + std::to_string(i));
      if (dir.size() != basis.mean.t.size())
        schema_fail(std::string("/") + key + "/" + std::to_string(i),
                    "direction size does not match mean");
      out.push_back(std::move(dir));
    }
    return out;
  };
  basis.shape_dirs = load_dirs("shape_dirs");
  basis.expr_dirs = load_dirs("expr_dirs");
  return basis;
}

TargetFile load_target_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, "", {"joints"}, {"markers"});
  TargetFile out;
  out.joints.p = get_vec3_list(j["joints"], "/joints");
  if (j.contains("markers")) {
    check_keys(j["markers"], "/markers", {"mouth_top", "mouth_bottom"});
    out.mouth_top = get_vec3(j["markers"]["mouth_top"], "/markers/mouth_top");
    out.mouth_bottom = get_vec3(j["markers"]["mouth_bottom"], "/markers/mouth_bottom");
  }
  return out;
}

std::string target_to_json(const TargetPose& target) {
  return json{{"joints", vec3_list_to_json(target.p)}}.dump(2) + "\n";
}

TwistAngles load_twists_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, "", {}, {"phi", "cos_sin"});
  if (j.contains("phi") == j.contains("cos_sin"))
    schema_fail("", "expected exactly one of 'phi' or 'cos_sin'");
  TwistAngles out;
  if (j.contains("phi")) {
    if (!j["phi"].is_array()) schema_fail("/phi", "expected an array");
    for (size_t i = 0; i < j["phi"].size(); ++i)
      out.phi.push_back(so3::TwistAngle::from_radians(
          get_number(j["phi"][i], "/phi/" + std::to_string(i))));
  } else {
    if (!j["cos_sin"].is_array()) schema_fail("/cos_sin", "expected an array");
    for (size_t i = 0; i < j["cos_sin"].size(); ++i) {
      const std::string path = "/cos_sin/" + std::to_string(i);
      const Vec2 cs = get_vec2(j["cos_sin"][i], path);
      out.phi.push_back(so3::TwistAngle::from_encoding(cs.x(), cs.y()));
    }
  }
  return out;
}

std::string twists_to_json(const TwistAngles& twists) {
  json phi = json::array();
  for (const so3::TwistAngle& t : twists.phi) phi.push_back(t.radians());
  return json{{"phi", std::move(phi)}}.dump(2) + "\n";
}

RotationSet load_rotations_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, "", {"rotations"});
  if (!j["rotations"].is_array()) schema_fail("/rotations", "expected an array");
  RotationSet out;
  for (size_t i = 0; i < j["rotations"].size(); ++i)
    out.rel.push_back(get_rotation(j["rotations"][i], "/rotations/" + std::to_string(i)));
  return out;
}

std::string rotations_to_json(const RotationSet& rots) {
  json arr = json::array();
  for (const Rot3& r : rots.rel) arr.push_back(rotation_to_json(r));
  return json{{"rotations", std::move(arr)}}.dump(2) + "\n";
}

P25File load_p25_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, "", {"uv", "d"}, {"s0"});
  P25File out;
  if (!j["uv"].is_array()) schema_fail("/uv", "expected an array");
  for (size_t i = 0; i < j["uv"].size(); ++i)
    out.p25.uv.push_back(get_vec2(j["uv"][i], "/uv/" + std::to_string(i)));
  if (!j["d"].is_array()) schema_fail("/d", "expected an array");
  for (size_t i = 0; i < j["d"].size(); ++i)
    out.p25.d.push_back(get_number(j["d"][i], "/d/" + std::to_string(i)));
  if (j.contains("s0")) out.s0 = get_number(j["s0"], "/s0");
  if (!(out.s0 > 0.0)) schema_fail("/s0", "scale must be positive");
  validate_p25(out.p25);
  return out;
}

harness::ScenarioConfig load_scenario_config_json(const std::string& text) {
  harness::ScenarioConfig cfg;
  fill_scenario(parse(text), "", cfg);
  return cfg;
}

BenchConfig load_bench_config_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, "", {},
             {"seed", "tree", "trials", "jitter_mm", "twist_mode", "twist_limits", "robustness",
              "twist_ablation", "camera"});

  // Shared fields first; the per-table sections are peeled off so the strict
  // key check in fill_scenario accepts the rest.
  json top = j;
  top.erase("robustness");
  top.erase("twist_ablation");
  top.erase("camera");
  harness::ScenarioConfig base;
  base.tree.clear();  // per-table defaults apply unless set explicitly
  fill_scenario(top, "", base);

  BenchConfig out;
  out.robustness = base;
  out.twist_ablation = base;
  out.camera = base;
  if (j.contains("robustness")) fill_scenario(j["robustness"], "/robustness", out.robustness);
  if (j.contains("twist_ablation"))
    fill_scenario(j["twist_ablation"], "/twist_ablation", out.twist_ablation);
  if (j.contains("camera")) fill_scenario(j["camera"], "/camera", out.camera);
  if (out.robustness.tree.empty()) out.robustness.tree = "wholebody";
  if (out.twist_ablation.tree.empty()) out.twist_ablation.tree = "body24";
  if (out.camera.tree.empty()) out.camera.tree = "body24";
  return out;
}

std::string pose_to_json(const Pose& pose) {
  return json{{"joints", vec3_list_to_json(pose.q)}}.dump(2) + "\n";
}

std::string fk_result_to_json(const FkResult& result) {
  json globals = json::array();
  for (const Rot3& r : result.globals) globals.push_back(rotation_to_json(r));
  return json{{"joints", vec3_list_to_json(result.pose.q)}, {"globals", std::move(globals)}}
             .dump(2) +
         "\n";
}

namespace {

json report_body(const SolveReport& report, const KinematicTree& tree, bool emit_residuals) {
  json rotations = json::array();
  for (const Rot3& r : report.rots.rel) rotations.push_back(rotation_to_json(r));
  json eps_norm_mm = json::array();
  for (const Vec3& e : report.eps) eps_norm_mm.push_back(e.norm() * 1000.0);

  json out{{"mode", solve_mode_name(report.mode)},
           {"joint_count", tree.joint_count()},
           {"rotations", std::move(rotations)},
           {"recon", vec3_list_to_json(report.recon.q)},
           {"eps", vec3_list_to_json(report.eps)},
           {"eps_norm_mm", std::move(eps_norm_mm)}};

  if (emit_residuals) {
    const std::vector<ErrorSplit> split = error_decomposition(report, tree);
    json decomposition = json::array();
    for (const ErrorSplit& e : split)
      decomposition.push_back(
          json{{"accumulated", vec3_to_json(e.accumulated)}, {"local", vec3_to_json(e.local)}});
    out["decomposition"] = std::move(decomposition);
  }
  return out;
}

}  // namespace

std::string report_to_json(const SolveReport& report, const KinematicTree& tree,
                           bool emit_residuals) {
  return report_body(report, tree, emit_residuals).dump(2) + "\n";
}

std::string wholebody_report_to_json(const WholebodyReport& report, const KinematicTree& tree,
                                     bool emit_residuals) {
  json out = report_body(report.base, tree, emit_residuals);
  json subtree = json::array();
  for (int k = 0; k < tree.joint_count(); ++k) subtree.push_back(subtree_tag_name(tree.joint(k).tag));
  out["subtree"] = std::move(subtree);
  json conflicts = json::array();
  for (const WholebodyReport::Conflict& c : report.conflicts)
    conflicts.push_back(json{{"joint", tree.joint(c.joint).name},
                             {"feasible", c.feasible},
                             {"residual_mm", c.residual * 1000.0}});
  out["conflicts"] = std::move(conflicts);
  return out.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) raise(ErrorCode::IoError, "failed writing '" + path + "'");
}

}  // namespace kinsolve
