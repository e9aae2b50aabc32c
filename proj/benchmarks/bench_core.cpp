#include <benchmark/benchmark.h>

#include <random>

#include "contactkit/compliance.hpp"
#include "contactkit/dynamics.hpp"
#include "contactkit/episodes.hpp"
#include "contactkit/impedance.hpp"
#include "contactkit/kinematics.hpp"
#include "contactkit/sensing.hpp"

using namespace contactkit;

static void BM_Jacobian6(benchmark::State& state) {
  const ChainModel chain = reference_six_dof();
  const VecX q = reference_six_dof_home();
  for (auto _ : state) benchmark::DoNotOptimize(jacobian(chain, q));
}
BENCHMARK(BM_Jacobian6);

static void BM_DynamicsTerms6(benchmark::State& state) {
  const ArmDynamicsModel model = reference_six_dof_dynamics();
  const VecX q = reference_six_dof_home();
  const VecX qdot = VecX::Constant(6, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(inverse_dynamics_terms(model, q, qdot));
}
BENCHMARK(BM_DynamicsTerms6);

static void BM_SimStepWithContact(benchmark::State& state) {
  const ArmDynamicsModel model = reference_six_dof_dynamics();
  SimState s = make_rest_state(model, reference_six_dof_home());
  ContactPlane plane;
  plane.offset = forward_kinematics(model.chain, s.q).translation.z() - 1e-3;
  for (auto _ : state) {
    const VecX g = inverse_dynamics_terms(model, s.q, s.qdot).gravity;
    s = step(model, s, g, &plane, 1e-3);
  }
}
BENCHMARK(BM_SimStepWithContact);

static void BM_ImpedanceTick(benchmark::State& state) {
  const ArmDynamicsModel model = reference_six_dof_dynamics();
  ImpedanceSession session(model, ImpedanceConfig{});
  const SimState s = make_rest_state(model, reference_six_dof_home());
  ComplianceCommand cmd;
  cmd.reference = forward_kinematics(model.chain, s.q);
  cmd.virtual_target = cmd.reference;
  cmd.virtual_target.translation.z() -= 5e-3;
  for (auto _ : state) benchmark::DoNotOptimize(session.execute_tick(s, cmd));
}
BENCHMARK(BM_ImpedanceTick);

static void BM_SolveIkPlanar(benchmark::State& state) {
  const ChainModel chain = planar_two_link();
  const Pose target{rot_z(1.2), Vec3(0.3, 0.5, 0.0)};
  for (auto _ : state) benchmark::DoNotOptimize(solve_ik(chain, Eigen::Vector2d(1.0, 1.0), target));
}
BENCHMARK(BM_SolveIkPlanar);

static void BM_IdentifyPayload(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<CalibrationSample> samples;
  for (int i = 0; i < state.range(0); ++i) {
    const Eigen::Quaterniond q(Eigen::Vector4d::Random().normalized());
    const Mat3 r = q.toRotationMatrix();
    const Vec3 f = r.transpose() * Vec3(0, 0, -3.35);
    samples.push_back({r, {f, Vec3(0, 0, 0.04).cross(f), WrenchFrame::kSensor}});
  }
  for (auto _ : state) benchmark::DoNotOptimize(identify_payload(samples));
}
BENCHMARK(BM_IdentifyPayload)->Arg(10)->Arg(10000);

static void BM_CompileChunk(benchmark::State& state) {
  ActionChunk chunk;
  for (int i = 0; i < 16; ++i) {
    ActionStep s;
    s.delta_xyz = Vec3(1e-3, 0, 0);
    s.force = Vec3(0, 0, 10.0);
    chunk.steps.push_back(s);
  }
  const StiffnessSchedule sched;
  for (auto _ : state) benchmark::DoNotOptimize(compile_chunk(chunk, Pose::Identity(), sched));
}
BENCHMARK(BM_CompileChunk);

static void BM_AlignThreeStreams(benchmark::State& state) {
  EpisodeManifest m;
  m.episode_id = "bench";
  m.streams = {{"pose", 200.0, pose_columns(), StreamKind::kPose},
               {"wrench", 1000.0, wrench_columns(), StreamKind::kWrench},
               {"gripper", 500.0, gripper_columns(), StreamKind::kGripper}};
  EpisodeRecord ep(m);
  for (const StreamSpec& s : m.streams) {
    const std::vector<double> v(s.columns.size(), 0.5);
    for (int i = 0; i < static_cast<int>(60.0 * s.rate_hz); ++i) ep.record(s.name, i / s.rate_hz, v);
  }
  const std::vector<std::string> names{"pose", "wrench", "gripper"};
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(align(ep, t, names));
    t = t > 59.0 ? 1.0 : t + 0.01;
  }
}
BENCHMARK(BM_AlignThreeStreams);
BENCHMARK_MAIN();
