#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kinsolve/camera.hpp"
#include "kinsolve/solver.hpp"
#include "kinsolve/wholebody.hpp"
#include "kinsolve/skeleton.hpp"

namespace kinsolve::harness {

// Deterministic RNG: mt19937_64 (bit-exact by the standard) with hand-rolled
// conversions, so streams are identical across platforms and library
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  Vec3 unit_vector();
  Rot3 rotation();                        // uniform over SO(3)

 private:
  std::mt19937_64 eng_;
};

// Stable per-trial substream seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t trial);

// Worker count for benchmark trials: KINSOLVE_THREADS when set, otherwise
// the hardware concurrency. Table contents are identical for any count;
// trials write to per-index slots and aggregation runs in trial order.
int thread_count();

enum class TwistMode { Gt, Zero, Random };
const char* twist_mode_name(TwistMode mode);
TwistMode twist_mode_from_name(const std::string& name);

struct ScenarioConfig {
  std::uint64_t seed = 12022;
  std::string tree = "wholebody";
  int trials = 200;
  std::vector<double> jitter_mm = {0.0, 10.0, 20.0, 30.0};
  TwistMode twist_mode = TwistMode::Gt;
  // Optional per-joint twist limits, radians; empty selects the default
  // table (wide for neck/elbow/wrist, 0.5 rad elsewhere).
  std::vector<double> twist_limits;
};

void validate_config(const ScenarioConfig& cfg, const KinematicTree& tree);

// Default per-joint twist limit, radians: joints named *neck*, *elbow*,
// *wrist* get the wide range, everything else stays under 30 degrees.
std::vector<double> default_twist_limits(const KinematicTree& tree);

struct GeneratedPose {
  RotationSet rots;
  TwistAngles twists;  // extracted ground truth, exact for the sampler
  Pose pose;
};

struct GeneratorOptions {
  double max_swing = 1.3;       // radians per joint
  double max_root_angle = 2.5;  // radians
  std::vector<double> twist_limits;  // empty -> default table
};

GeneratedPose generate_pose(const KinematicTree& tree, const RestPose& rest, std::uint64_t seed);
GeneratedPose generate_pose(const KinematicTree& tree, const RestPose& rest, std::uint64_t seed,
                            const GeneratorOptions& options);

// Per-coordinate uniform noise in +-level_mm millimeters; the root jitters
// too.
TargetPose jitter(const Pose& pose, double level_mm, std::uint64_t seed);

TwistAngles random_twists(const KinematicTree& tree, std::uint64_t seed);

// ---- Tables ---------------------------------------------------------------

struct BenchRow {
  std::string mode;
  double jitter_mm;
  double body_mpjpe_mm;
  double hand_mpjpe_mm;
};

struct BenchTable {
  std::vector<BenchRow> rows;
  std::uint64_t seed = 0;
  int trials = 0;
};

// Per-trial robustness samples; [mode][level][trial] MPJPE in mm.
struct RobustnessSamples {
  std::vector<std::string> modes;  // naive, adaptive, wholebody
  std::vector<double> jitter_mm;
  std::vector<std::vector<std::vector<double>>> body;
  std::vector<std::vector<std::vector<double>>> hand;
};

RobustnessSamples run_robustness_samples(const ScenarioConfig& cfg);
BenchTable run_robustness(const ScenarioConfig& cfg);

struct TwistAblationRow {
  std::string mode;  // gt, zero, random
  double joint_mpjpe_mm;
  double rot_geodesic_deg;
};

struct TwistAblationTable {
  std::vector<TwistAblationRow> rows;
  std::uint64_t seed = 0;
  int trials = 0;
};

TwistAblationTable run_twist_ablation(const ScenarioConfig& cfg);

struct CameraBenchTable {
  std::vector<double> depth_err_mm;   // |Z_est - Z_true| mean, per ICE step 0..5
  std::vector<double> reproj_err_mmf1; // rms reprojection error * 1000, per step
  std::uint64_t seed = 0;
  int scenes = 0;
};

CameraBenchTable run_camera_bench(const ScenarioConfig& cfg);

// Deterministic CSV emission: '#key=value' metadata comment lines, then a
// header row, then fixed-precision data rows.
std::string to_csv(const BenchTable& table);
std::string to_csv(const TwistAblationTable& table);
std::string to_csv(const CameraBenchTable& table);
std::string ice_trace_csv(const std::vector<IceTraceRow>& trace, std::uint64_t seed);

// Strips '#' comment lines; golden comparisons work on the stripped text.
std::string strip_csv_comments(const std::string& csv);

// ---- Test oracles ----------------------------------------------------------

// Dense sweep of the two-sphere intersection circle; returns the sampled
// point closest to b. Raises Infeasible when the spheres do not intersect.
Vec3 brute_force_backward_oracle(const BackwardUpdateProblem& prob, int samples = 1000000);

}  // namespace kinsolve::harness
