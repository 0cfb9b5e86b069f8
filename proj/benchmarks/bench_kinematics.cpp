#include <benchmark/benchmark.h>

#include <kinsolve/camera.hpp>
#include <kinsolve/harness.hpp>
#include <kinsolve/solver.hpp>
#include <kinsolve/wholebody.hpp>
#include <kinsolve/skeleton.hpp>

using namespace kinsolve;

namespace {

struct Body24Case {
  const SkeletonModel& model = builtin_tree("body24");
  harness::GeneratedPose gen = harness::generate_pose(model.tree, model.rest, 1);
  TargetPose target = harness::jitter(gen.pose, 10.0, 2);
};

struct WholebodyCase {
  const SkeletonModel& model = builtin_tree("wholebody");
  harness::GeneratedPose gen = harness::generate_pose(model.tree, model.rest, 3);
  TargetPose target = harness::jitter(gen.pose, 10.0, 4);
  MarkerPair markers = make_marker_pair(model.tree, model.rest, target);
};

void BM_FkBody24(benchmark::State& state) {
  Body24Case c;
  for (auto _ : state)
    benchmark::DoNotOptimize(fk(c.model.tree, c.model.rest, c.gen.rots));
}
BENCHMARK(BM_FkBody24);

void BM_FkWholebody(benchmark::State& state) {
  WholebodyCase c;
  for (auto _ : state)
    benchmark::DoNotOptimize(fk(c.model.tree, c.model.rest, c.gen.rots));
}
BENCHMARK(BM_FkWholebody);

void BM_ExtractTwists(benchmark::State& state) {
  Body24Case c;
  for (auto _ : state)
    benchmark::DoNotOptimize(extract_twists(c.model.tree, c.model.rest, c.gen.rots));
}
BENCHMARK(BM_ExtractTwists);

void BM_RegisterRoot(benchmark::State& state) {
  Body24Case c;
  RegistrationProblem prob;
  const std::array<int, 3>& trip = c.model.tree.root_triplet();
  for (int i = 0; i < 3; ++i) {
    prob.template_triplet[i] = c.model.rest.t[trip[i]] - c.model.rest.t[0];
    prob.target_triplet[i] = c.target.p[trip[i]] - c.target.p[0];
  }
  for (auto _ : state) benchmark::DoNotOptimize(register_root(prob));
}
BENCHMARK(BM_RegisterRoot);

void BM_SolveNaiveBody24(benchmark::State& state) {
  Body24Case c;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_naive(c.model.tree, c.model.rest, c.target, c.gen.twists));
}
BENCHMARK(BM_SolveNaiveBody24);

void BM_SolveAdaptiveBody24(benchmark::State& state) {
  Body24Case c;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_adaptive(c.model.tree, c.model.rest, c.target, c.gen.twists));
}
BENCHMARK(BM_SolveAdaptiveBody24);

void BM_SolveWholebody(benchmark::State& state) {
  WholebodyCase c;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_wholebody(c.model.tree, c.model.rest, c.target, c.gen.twists, c.markers));
}
BENCHMARK(BM_SolveWholebody);

void BM_BackwardUpdate(benchmark::State& state) {
  const BackwardUpdateProblem prob{Vec3(0, 0, 0), Vec3(0.6, 2, 0), Vec3(1.2, 0, 0), 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(backward_update(prob));
}
BENCHMARK(BM_BackwardUpdate);

void BM_IceThreeSteps(benchmark::State& state) {
  const SkeletonModel& model = builtin_tree("body24");
  const harness::GeneratedPose gen = harness::generate_pose(model.tree, model.rest, 7);
  const double depth = 3.0;
  TargetPose abs;
  abs.p.resize(24);
  for (int k = 0; k < 24; ++k)
    abs.p[k] = gen.pose.q[k] - gen.pose.q[0] + Vec3(0.1, -0.1, depth);
  Pose2p5D p25;
  p25.uv = project(abs);
  p25.d.resize(24);
  for (int k = 0; k < 24; ++k) p25.d[k] = abs.p[k].z() - depth;
  const SolveFn solver = [&](const TargetPose& joints) {
    return solve_adaptive(model.tree, model.rest, joints, gen.twists);
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(ice(p25, CameraScale{1.4 / depth}, solver, 3));
}
BENCHMARK(BM_IceThreeSteps);

}  // namespace

BENCHMARK_MAIN();
