#include "attest/sensor_sim.hpp"

#include <cmath>

namespace attest {

namespace {

enum class Stream : std::uint64_t { Accel = 1, Gyro = 2, Bias = 3, Mag = 4 };

Rng make_stream(std::uint64_t seed, Stream s) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s)};
  return Rng(seq);
}

}  // namespace

void SensorConfig::validate() const {
  if (accel_noise_std < 0 || gyro_noise_std < 0 || gyro_bias_walk_std < 0 || mag_noise_std < 0)
    throw ConfigError("sensor noise standard deviations must be >= 0");
  if (gyro_bias_lpf_tau < 0) throw ConfigError("gyro bias filter time constant must be >= 0");
  if (!(sample_rate > 0)) throw ConfigError("sample rate must be > 0");
  if (!(mag_field.norm() > 0)) throw ConfigError("magnetic field must be nonzero");
}

Vec3 gaussian3(Rng& rng, double std) {
  if (std == 0.0) return Vec3::Zero();
  std::normal_distribution<double> n(0.0, std);
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return {x, y, z};
}

GyroBiasState step_gyro_bias(const GyroBiasState& state, const SensorConfig& cfg, double dt, Rng& rng) {
  GyroBiasState out = state;
  out.b_raw += gaussian3(rng, cfg.gyro_bias_walk_std * std::sqrt(dt / 60.0));
  // Exact single-pole discretization; tau = 0 passes the random walk through.
  const double k = cfg.gyro_bias_lpf_tau > 0.0 ? -std::expm1(-dt / cfg.gyro_bias_lpf_tau) : 1.0;
  out.b = state.b + k * (out.b_raw - state.b);
  return out;
}

Vec3 simulate_accel(const TruthSample& truth, const SensorConfig& cfg, Rng& rng) {
  const Mat3 c_bn = quat_to_dcm(truth.q).transpose();
  return c_bn * (cfg.gravity + truth.rddot) + gaussian3(rng, cfg.accel_noise_std);
}

Vec3 simulate_gyro(const TruthSample& truth, const GyroBiasState& bias, const SensorConfig& cfg, Rng& rng) {
  return truth.w + bias.b + gaussian3(rng, cfg.gyro_noise_std);
}

Vec3 simulate_mag(const TruthSample& truth, const SensorConfig& cfg, Rng& rng) {
  const Mat3 c_bn = quat_to_dcm(truth.q).transpose();
  return c_bn * cfg.mag_field + gaussian3(rng, cfg.mag_noise_std);
}

SensorSimulator::SensorSimulator(const SensorConfig& cfg)
    : cfg_(cfg),
      accel_rng_(make_stream(cfg.seed, Stream::Accel)),
      gyro_rng_(make_stream(cfg.seed, Stream::Gyro)),
      bias_rng_(make_stream(cfg.seed, Stream::Bias)),
      mag_rng_(make_stream(cfg.seed, Stream::Mag)) {
  cfg_.validate();
}

SensorSample SensorSimulator::sample(const TruthSample& truth) {
  if (last_t_) {
    const double dt = truth.t - *last_t_;
    if (dt > 0.0) bias_ = step_gyro_bias(bias_, cfg_, dt, bias_rng_);
  }
  last_t_ = truth.t;

  SensorSample s;
  s.t = truth.t;
  s.accel = simulate_accel(truth, cfg_, accel_rng_);
  s.gyro = simulate_gyro(truth, bias_, cfg_, gyro_rng_);
  s.mag = simulate_mag(truth, cfg_, mag_rng_);
  s.true_bias = bias_.b;
  return s;
}

}  // namespace attest
