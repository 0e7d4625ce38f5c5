#include <random>

#include <benchmark/benchmark.h>

#include "attest/harness.hpp"

namespace {

using namespace attest;

Quaternion sample_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Quaternion(n(rng), n(rng), n(rng), n(rng)).normalized();
}

void BM_QuatMult(benchmark::State& st) {
  std::mt19937_64 rng(1);
  const Quaternion a = sample_quat(rng);
  Quaternion b = sample_quat(rng);
  for (auto _ : st) {
    b = quat_mult(a, b);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_QuatMult);

void BM_QuatToVec3(benchmark::State& st) {
  const Rep rep = static_cast<Rep>(st.range(0));
  std::mt19937_64 rng(2);
  const Quaternion q = sample_quat(rng);
  for (auto _ : st) {
    auto v = quat_to_vec3(rep, q);
    benchmark::DoNotOptimize(v);
  }
  st.SetLabel(to_string(rep));
}
BENCHMARK(BM_QuatToVec3)
    ->Arg(static_cast<int>(Rep::EulerVector))
    ->Arg(static_cast<int>(Rep::Gibbs))
    ->Arg(static_cast<int>(Rep::MRP));

void BM_IntegrateStep(benchmark::State& st) {
  Quaternion q = Quaternion::identity();
  const Vec3 w(0.1, -0.2, 0.3);
  for (auto _ : st) {
    q = quat_integrate_step(q, w, Vec3::Zero(), 0.01);
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_IntegrateStep);

struct Readings {
  VectorObservation accel;
  VectorObservation mag;
  Mat3 r_accel;
  Mat3 r_mag;
};

Readings level_readings() {
  const EstimatorParams p = EstimatorParams::defaults();
  const MagReference ref = MagReference::from_declination(0.0);
  const Quaternion q = Quaternion::identity();
  return {accel_observation(Vec3(0.01, -0.02, 9.81), Vec3(0.0, 0.0, 9.81)),
          mag_observation(Vec3(0.5, 0.02, 0.3), q, ref, MagUsage::Horizontal), p.ekf.nominal.r_accel,
          p.ekf.nominal.r_mag};
}

void BM_EkfStep(benchmark::State& st) {
  const Readings r = level_readings();
  const Mat6 Q = EstimatorParams::defaults().q_ekf;
  EkfState s{Quaternion::identity(), Vec3::Zero(), 1e-4 * Mat6::Identity()};
  for (auto _ : st) {
    s = ekf_propagate(s, Vec3(0.01, 0.0, -0.01), 0.01, Q);
    s = ekf_update(s, r.accel, r.r_accel);
    s = ekf_update(s, r.mag, r.r_mag);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_EkfStep);

void BM_UkfStep(benchmark::State& st) {
  const Readings r = level_readings();
  const UkfConfig cfg{1.0, EstimatorParams::defaults().q_ukf};
  UkfState s;
  s.q_hat = Quaternion::identity();
  s.P = 1e-4 * Mat6::Identity();
  for (auto _ : st) {
    s = ukf_propagate(s, Vec3(0.01, 0.0, -0.01), 0.01, cfg);
    s = ukf_update(s, r.accel, r.r_accel);
    s = ukf_update(s, r.mag, r.r_mag);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_UkfStep);

void BM_RunCase(benchmark::State& st) {
  RunConfig cfg;
  cfg.estimator = static_cast<EstimatorKind>(st.range(0));
  cfg.testcase = "mockup";
  for (auto _ : st) {
    RunResult r = run_case(cfg);
    benchmark::DoNotOptimize(r.metrics);
  }
  st.SetLabel(to_string(cfg.estimator));
}
BENCHMARK(BM_RunCase)
    ->Arg(static_cast<int>(EstimatorKind::Cf))
    ->Arg(static_cast<int>(EstimatorKind::Ekf))
    ->Arg(static_cast<int>(EstimatorKind::Ukf))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
