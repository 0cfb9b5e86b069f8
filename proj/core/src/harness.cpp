#include "kinsolve/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "kinsolve/camera.hpp"
#include "kinsolve/errors.hpp"
#include "kinsolve/version.hpp"

namespace kinsolve::harness {

namespace {

constexpr double kDefaultTwistLimit = 0.5;  // radians, under the 30-degree band
constexpr double kWideTwistLimit = 1.2;

void append_metadata(std::string& out, std::uint64_t seed, int trials) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "#seed=%llu\n", static_cast<unsigned long long>(seed));
  out += buf;
  std::snprintf(buf, sizeof(buf), "#trials=%d\n", trials);
  out += buf;
  out += std::string("#version=kinsolve ") + kVersion + "\n";
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

// Runs fn(trial) for every trial index; splits the range across workers.
// The first exception, if any, is rethrown after all workers join.
void for_each_trial(int trials, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), trials);
  if (workers <= 1) {
    for (int i = 0; i < trials; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < trials; i += workers) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double mpjpe_mm(const Pose& recon, const Pose& gt, const std::vector<int>& joints) {
  double acc = 0.0;
  for (int k : joints) acc += (recon.q[k] - gt.q[k]).norm();
  return joints.empty() ? 0.0 : 1000.0 * acc / static_cast<double>(joints.size());
}

double geodesic_deg(const Rot3& a, const Rot3& b) {
  const double c = std::clamp(0.5 * ((a.transpose() * b).trace() - 1.0), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

Vec3 Rng::unit_vector() {
  const double z = uniform(-1.0, 1.0);
  const double theta = uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(r * std::cos(theta), r * std::sin(theta), z);
}

Rot3 Rng::rotation() {
  // Shoemake's subgroup method: uniform unit quaternion from three uniforms.
  const double u1 = uniform();
  const double u2 = uniform(0.0, 2.0 * std::numbers::pi);
  const double u3 = uniform(0.0, 2.0 * std::numbers::pi);
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return so3::from_quaternion_wxyz(
      {a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)});
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t trial) {
  // splitmix64 finalizer over the combined stream id.
  std::uint64_t x = seed ^ (salt * 0x9E3779B97F4A7C15ull) ^ (trial + 0x632BE59BD9B4E019ull);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

int thread_count() {
  if (const char* env = std::getenv("KINSOLVE_THREADS")) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1) return static_cast<int>(std::min<long>(requested, 256));
  }
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw < 1 ? 1 : hw;
}

const char* twist_mode_name(TwistMode mode) {
  switch (mode) {
    case TwistMode::Gt: return "gt";
    case TwistMode::Zero: return "zero";
    case TwistMode::Random: return "random";
  }
  return "gt";
}

TwistMode twist_mode_from_name(const std::string& name) {
  if (name == "gt") return TwistMode::Gt;
  if (name == "zero") return TwistMode::Zero;
  if (name == "random") return TwistMode::Random;
  raise(ErrorCode::SchemaError, "unknown twist mode '" + name + "'");
}

void validate_config(const ScenarioConfig& cfg, const KinematicTree& tree) {
  if (cfg.trials <= 0) raise(ErrorCode::SchemaError, "trials must be positive");
  for (double level : cfg.jitter_mm)
    if (level < 0.0) raise(ErrorCode::SchemaError, "jitter levels must be non-negative");
  if (!cfg.twist_limits.empty() &&
      static_cast<int>(cfg.twist_limits.size()) != tree.joint_count())
    raise(ErrorCode::DimensionMismatch, "twist limit count does not match tree");
}

std::vector<double> default_twist_limits(const KinematicTree& tree) {
  std::vector<double> limits(tree.joint_count(), kDefaultTwistLimit);
  for (int k = 0; k < tree.joint_count(); ++k) {
    const std::string& name = tree.joint(k).name;
    if (name.find("neck") != std::string::npos || name.find("elbow") != std::string::npos ||
        name.find("wrist") != std::string::npos)
      limits[k] = kWideTwistLimit;
  }
  return limits;
}

GeneratedPose generate_pose(const KinematicTree& tree, const RestPose& rest, std::uint64_t seed) {
  return generate_pose(tree, rest, seed, GeneratorOptions{});
}

GeneratedPose generate_pose(const KinematicTree& tree, const RestPose& rest, std::uint64_t seed,
                            const GeneratorOptions& options) {
  const int k_count = tree.joint_count();
  const std::vector<double> limits =
      options.twist_limits.empty() ? default_twist_limits(tree) : options.twist_limits;
  if (static_cast<int>(limits.size()) != k_count)
    raise(ErrorCode::DimensionMismatch, "twist limit count does not match tree");

  Rng rng(seed);
  GeneratedPose out;
  out.rots.rel.resize(k_count);
  out.twists = zero_twists(k_count);

  // Registration triplet joints form rigid segments: the pelvis carries both
  // hip sockets and the lowest spine joint, and each palm carries its three
  // metacarpal heads. Their relative rotations stay identity.
  std::vector<bool> rigid_with_root(k_count, false);
  for (int idx : tree.root_triplet())
    if (idx > 0) rigid_with_root[idx] = true;
  for (int j = 0; j < k_count; ++j) {
    int hand_children = 0;
    for (int child : tree.children(j)) {
      const SubtreeTag tag = tree.joint(child).tag;
      if ((tag == SubtreeTag::LeftHand || tag == SubtreeTag::RightHand) &&
          tree.joint(j).tag != tag && hand_children < 3) {
        rigid_with_root[child] = true;
        ++hand_children;
      }
    }
  }

  {
    const Vec3 axis = rng.unit_vector();
    const double angle = rng.uniform(0.0, options.max_root_angle);
    out.rots.rel[0] = so3::from_axis_angle({axis, angle});
  }
  const int mouth_bottom = tree.find("mouth_bottom");
  for (int k = 1; k < k_count; ++k) {
    if (rigid_with_root[k]) {
      out.rots.rel[k] = Rot3::Identity();
      continue;
    }
    const bool face = tree.joint(k).tag == SubtreeTag::Face;
    if (face && tree.joint(k).name != "jaw") {
      // Eyes and mouth markers ride their parents.
      out.rots.rel[k] = Rot3::Identity();
      continue;
    }
    const Vec3 bone_k = bone(tree, rest, k);
    // The jaw is a twist-free hinge about an axis perpendicular to the
    // pivot-to-mouth_bottom vector, which is what the marker pair measures.
    const bool jaw = face;
    const Vec3 swing_ref = (jaw && mouth_bottom >= 0)
                               ? Vec3(rest.t[mouth_bottom] - rest.t[tree.parent(k)])
                               : bone_k;
    const Vec3 unit = swing_ref.normalized();
    Vec3 axis;
    do {
      const Vec3 raw = rng.unit_vector();
      axis = raw - raw.dot(unit) * unit;
    } while (axis.norm() < 1e-3);
    axis.normalize();
    const double alpha = rng.uniform(0.0, options.max_swing);
    const double phi = jaw ? 0.0 : rng.uniform(-limits[k], limits[k]);
    const Rot3 swing = so3::from_axis_angle({axis, alpha});
    out.rots.rel[k] = so3::compose_twist_swing(swing, so3::twist_about(bone_k, phi));
    out.twists.phi[k] = so3::TwistAngle::from_radians(phi);
  }
  out.pose = fk(tree, rest, out.rots).pose;
  return out;
}

TargetPose jitter(const Pose& pose, double level_mm, std::uint64_t seed) {
  Rng rng(seed);
  const double level = level_mm * 1e-3;
  TargetPose out;
  out.p.resize(pose.q.size());
  for (size_t k = 0; k < pose.q.size(); ++k) {
    const double dx = rng.uniform(-level, level);
    const double dy = rng.uniform(-level, level);
    const double dz = rng.uniform(-level, level);
    out.p[k] = pose.q[k] + Vec3(dx, dy, dz);
  }
  return out;
}

TwistAngles random_twists(const KinematicTree& tree, std::uint64_t seed) {
  Rng rng(seed);
  TwistAngles out = zero_twists(tree.joint_count());
  for (int k = 1; k < tree.joint_count(); ++k)
    out.phi[k] =
        so3::TwistAngle::from_radians(rng.uniform(-std::numbers::pi, std::numbers::pi));
  return out;
}

RobustnessSamples run_robustness_samples(const ScenarioConfig& cfg) {
  const SkeletonModel& model = builtin_tree(cfg.tree);
  const KinematicTree& tree = model.tree;
  const RestPose& rest = model.rest;
  validate_config(cfg, tree);

  const SubtreeSplit split = split_subtrees(tree);
  std::vector<int> body_joints = split.slice(SubtreeTag::Body).joints;
  std::vector<int> hand_joints;
  for (SubtreeTag tag : {SubtreeTag::LeftHand, SubtreeTag::RightHand})
    for (int k : split.slice(tag).joints)
      if (tree.joint(k).tag == tag) hand_joints.push_back(k);

  RobustnessSamples samples;
  samples.modes = {"naive", "adaptive", "wholebody"};
  samples.jitter_mm = cfg.jitter_mm;
  const size_t n_modes = samples.modes.size();
  const size_t n_levels = cfg.jitter_mm.size();
  samples.body.assign(n_modes, std::vector<std::vector<double>>(
                                   n_levels, std::vector<double>(cfg.trials, 0.0)));
  samples.hand = samples.body;

  GeneratorOptions gen_options;
  gen_options.twist_limits = cfg.twist_limits;

  for_each_trial(cfg.trials, [&](int trial) {
    const GeneratedPose gen =
        generate_pose(tree, rest, mix_seed(cfg.seed, 0x0b1u, trial), gen_options);
    TwistAngles twists;
    switch (cfg.twist_mode) {
      case TwistMode::Gt: twists = gen.twists; break;
      case TwistMode::Zero: twists = zero_twists(tree.joint_count()); break;
      case TwistMode::Random: twists = random_twists(tree, mix_seed(cfg.seed, 0x7717u, trial)); break;
    }
    for (size_t li = 0; li < n_levels; ++li) {
      const TargetPose target =
          jitter(gen.pose, cfg.jitter_mm[li], mix_seed(cfg.seed, 0x11e0u + li, trial));
      const MarkerPair markers = make_marker_pair(tree, rest, target);

      const SolveReport naive = solve_naive(tree, rest, target, twists);
      const SolveReport adaptive = solve_adaptive(tree, rest, target, twists);
      const WholebodyReport wb = solve_wholebody(tree, rest, target, twists, markers);

      samples.body[0][li][trial] = mpjpe_mm(naive.recon, gen.pose, body_joints);
      samples.hand[0][li][trial] = mpjpe_mm(naive.recon, gen.pose, hand_joints);
      samples.body[1][li][trial] = mpjpe_mm(adaptive.recon, gen.pose, body_joints);
      samples.hand[1][li][trial] = mpjpe_mm(adaptive.recon, gen.pose, hand_joints);
      samples.body[2][li][trial] = mpjpe_mm(wb.base.recon, gen.pose, body_joints);
      samples.hand[2][li][trial] = mpjpe_mm(wb.base.recon, gen.pose, hand_joints);
    }
  });
  return samples;
}

BenchTable run_robustness(const ScenarioConfig& cfg) {
  const RobustnessSamples samples = run_robustness_samples(cfg);
  BenchTable table;
  table.seed = cfg.seed;
  table.trials = cfg.trials;
  for (size_t mi = 0; mi < samples.modes.size(); ++mi)
    for (size_t li = 0; li < samples.jitter_mm.size(); ++li)
      table.rows.push_back(BenchRow{samples.modes[mi], samples.jitter_mm[li],
                                    mean(samples.body[mi][li]), mean(samples.hand[mi][li])});
  return table;
}

TwistAblationTable run_twist_ablation(const ScenarioConfig& cfg) {
  const SkeletonModel& model = builtin_tree(cfg.tree);
  const KinematicTree& tree = model.tree;
  const RestPose& rest = model.rest;
  validate_config(cfg, tree);
  const int k_count = tree.joint_count();

  GeneratorOptions gen_options;
  gen_options.twist_limits = cfg.twist_limits;

  const std::vector<std::string> modes = {"gt", "zero", "random"};
  std::vector<std::vector<double>> joint_err(3, std::vector<double>(cfg.trials, 0.0));
  std::vector<std::vector<double>> rot_err(3, std::vector<double>(cfg.trials, 0.0));

  std::vector<int> all_joints(k_count);
  for (int k = 0; k < k_count; ++k) all_joints[k] = k;

  for_each_trial(cfg.trials, [&](int trial) {
    const GeneratedPose gen =
        generate_pose(tree, rest, mix_seed(cfg.seed, 0xab1au, trial), gen_options);
    TargetPose target;
    target.p = gen.pose.q;  // exact joints; only the twist source varies

    for (int mi = 0; mi < 3; ++mi) {
      TwistAngles twists;
      if (mi == 0) twists = gen.twists;
      else if (mi == 1) twists = zero_twists(k_count);
      else twists = random_twists(tree, mix_seed(cfg.seed, 0x5eedu, trial));

      const SolveReport report = solve_adaptive(tree, rest, target, twists);
      joint_err[mi][trial] = mpjpe_mm(report.recon, gen.pose, all_joints);
      double acc = 0.0;
      for (int k = 1; k < k_count; ++k)
        acc += geodesic_deg(report.rots.rel[k], gen.rots.rel[k]);
      rot_err[mi][trial] = acc / static_cast<double>(k_count - 1);
    }
  });

  TwistAblationTable table;
  table.seed = cfg.seed;
  table.trials = cfg.trials;
  for (int mi = 0; mi < 3; ++mi)
    table.rows.push_back(TwistAblationRow{modes[mi], mean(joint_err[mi]), mean(rot_err[mi])});
  return table;
}

CameraBenchTable run_camera_bench(const ScenarioConfig& cfg) {
  const SkeletonModel& model = builtin_tree(cfg.tree);
  const KinematicTree& tree = model.tree;
  const RestPose& rest = model.rest;
  validate_config(cfg, tree);
  constexpr int kSteps = 5;

  GeneratorOptions gen_options;
  gen_options.twist_limits = cfg.twist_limits;

  std::vector<std::vector<double>> depth_err(kSteps + 1, std::vector<double>(cfg.trials, 0.0));
  std::vector<std::vector<double>> reproj_err(kSteps + 1, std::vector<double>(cfg.trials, 0.0));

  for_each_trial(cfg.trials, [&](int trial) {
    Rng rng(mix_seed(cfg.seed, 0xcafeu, trial));
    const GeneratedPose gen =
        generate_pose(tree, rest, mix_seed(cfg.seed, 0x5ce9eu, trial), gen_options);

    const double depth_true = rng.uniform(2.0, 5.0);
    const Vec2 root_uv(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));

    TargetPose absolute;
    absolute.p.resize(gen.pose.q.size());
    for (size_t k = 0; k < gen.pose.q.size(); ++k) {
      const Vec3 rel = gen.pose.q[k] - gen.pose.q[0];
      absolute.p[k] =
          rel + Vec3(root_uv.x() * depth_true, root_uv.y() * depth_true, depth_true);
    }

    Pose2p5D p25;
    p25.uv = project(absolute);
    p25.d.resize(absolute.p.size());
    for (size_t k = 0; k < absolute.p.size(); ++k) p25.d[k] = absolute.p[k].z() - depth_true;

    const double s0 = (1.0 / depth_true) * rng.uniform(0.5, 2.0);
    const SolveFn solver = [&](const TargetPose& joints) {
      return solve_adaptive(tree, rest, joints, gen.twists);
    };
    const IceResult result = ice(p25, CameraScale{s0}, solver, kSteps);

    for (int t = 0; t <= kSteps; ++t) {
      // A converged (early-exited) trace keeps its last values.
      const IceTraceRow& row =
          result.trace[std::min<size_t>(t, result.trace.size() - 1)];
      depth_err[t][trial] = std::abs(1.0 / row.s - depth_true) * 1000.0;
      reproj_err[t][trial] = row.reproj_err * 1000.0;
    }
  });

  CameraBenchTable table;
  table.seed = cfg.seed;
  table.scenes = cfg.trials;
  for (int t = 0; t <= kSteps; ++t) {
    table.depth_err_mm.push_back(mean(depth_err[t]));
    table.reproj_err_mmf1.push_back(mean(reproj_err[t]));
  }
  return table;
}

std::string to_csv(const BenchTable& table) {
  std::string out;
  append_metadata(out, table.seed, table.trials);
  out += "mode,jitter_mm,body_mpjpe_mm,hand_mpjpe_mm\n";
  for (const BenchRow& row : table.rows) {
    out += row.mode + "," + format_fixed(row.jitter_mm, 1) + "," +
           format_fixed(row.body_mpjpe_mm, 6) + "," + format_fixed(row.hand_mpjpe_mm, 6) + "\n";
  }
  return out;
}

std::string to_csv(const TwistAblationTable& table) {
  std::string out;
  append_metadata(out, table.seed, table.trials);
  out += "mode,joint_mpjpe_mm,rot_geodesic_deg\n";
  for (const TwistAblationRow& row : table.rows)
    out += row.mode + "," + format_fixed(row.joint_mpjpe_mm, 6) + "," +
           format_fixed(row.rot_geodesic_deg, 6) + "\n";
  return out;
}

std::string to_csv(const CameraBenchTable& table) {
  std::string out;
  append_metadata(out, table.seed, table.scenes);
  out += "metric,step0,step1,step2,step3,step4,step5\n";
  out += "depth_err_mm";
  for (double v : table.depth_err_mm) out += "," + format_fixed(v, 6);
  out += "\nreproj_err_mmf1";
  for (double v : table.reproj_err_mmf1) out += "," + format_fixed(v, 6);
  out += "\n";
  return out;
}

std::string ice_trace_csv(const std::vector<IceTraceRow>& trace, std::uint64_t seed) {
  std::string out;
  append_metadata(out, seed, static_cast<int>(trace.size()));
  out += "step,s,reproj_err_mmf1\n";
  for (const IceTraceRow& row : trace)
    out += std::to_string(row.step) + "," + format_fixed(row.s, 9) + "," +
           format_fixed(row.reproj_err * 1000.0, 6) + "\n";
  return out;
}

std::string strip_csv_comments(const std::string& csv) {
  std::string out;
  size_t pos = 0;
  while (pos < csv.size()) {
    size_t end = csv.find('\n', pos);
    if (end == std::string::npos) end = csv.size();
    if (pos < csv.size() && csv[pos] != '#') out += csv.substr(pos, end - pos + 1);
    pos = end + 1;
  }
  return out;
}

Vec3 brute_force_backward_oracle(const BackwardUpdateProblem& prob, int samples) {
  const Vec3 ac = prob.c - prob.a;
  const double d2 = ac.squaredNorm();
  if (d2 < so3::kNormEps * so3::kNormEps)
    raise(ErrorCode::CoincidentAC, "grandparent and distal joint coincide");
  const double m = (prob.len_pa * prob.len_pa - prob.len_k * prob.len_k + d2) / (2.0 * d2);
  const double n2 = prob.len_pa * prob.len_pa - m * m * d2;
  if (n2 < 0.0) raise(ErrorCode::Infeasible, "spheres do not intersect");
  const double n = std::sqrt(n2);

  const Vec3 center = prob.a + m * ac;
  const Vec3 u = so3::any_perpendicular(ac);
  const Vec3 v = ac.normalized().cross(u);

  Vec3 best = center + n * u;
  double best_dist = (best - prob.b).squaredNorm();
  for (int i = 1; i < samples; ++i) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / samples;
    const Vec3 point = center + n * (std::cos(theta) * u + std::sin(theta) * v);
    const double dist = (point - prob.b).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = point;
    }
  }
  return best;
}

}  // namespace kinsolve::harness
