#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "attest/attitude.hpp"

namespace attest {

// Ground truth at one instant.
struct TruthSample {
  double t = 0.0;                 // s
  Quaternion q;                   // N_q_B
  Vec3 w = Vec3::Zero();          // body rate, rad/s
  Vec3 rddot = Vec3::Zero();      // inertial translational acceleration, m/s^2
  std::optional<Vec3> r;          // m
  std::optional<Vec3> v;          // m/s
};

inline constexpr double kDegToRad = 0.017453292519943295;
inline constexpr double kRadToDeg = 57.29577951308232;

struct SensorConfig {
  double accel_noise_std = 0.5;                       // m/s^2 per axis
  double gyro_noise_std = 0.05 * kDegToRad;           // rad/s per axis
  double gyro_bias_walk_std = 0.2 * kDegToRad;        // rad/s per minute
  double gyro_bias_lpf_tau = 5.0;                     // s
  double mag_noise_std = 0.015;                       // gauss per axis
  Vec3 gravity = Vec3(0.0, 0.0, 9.81);                // m/s^2, inertial
  Vec3 mag_field = Vec3(0.21, 0.0, 0.43);             // gauss, inertial
  double sample_rate = 100.0;                         // Hz
  std::uint64_t seed = 1;

  // Throws ConfigError on negative stds or a nonpositive rate.
  void validate() const;
};

struct GyroBiasState {
  Vec3 b_raw = Vec3::Zero();  // random-walk state, rad/s
  Vec3 b = Vec3::Zero();      // low-pass filtered bias applied to the gyro, rad/s
};

struct SensorSample {
  double t = 0.0;
  Vec3 accel = Vec3::Zero();      // m/s^2
  Vec3 gyro = Vec3::Zero();       // rad/s
  Vec3 mag = Vec3::Zero();        // gauss
  Vec3 true_bias = Vec3::Zero();  // rad/s
};

using Rng = std::mt19937_64;

// Draws one N(0, std^2) sample per axis.
Vec3 gaussian3(Rng& rng, double std);

GyroBiasState step_gyro_bias(const GyroBiasState& state, const SensorConfig& cfg, double dt, Rng& rng);
Vec3 simulate_accel(const TruthSample& truth, const SensorConfig& cfg, Rng& rng);
Vec3 simulate_gyro(const TruthSample& truth, const GyroBiasState& bias, const SensorConfig& cfg, Rng& rng);
Vec3 simulate_mag(const TruthSample& truth, const SensorConfig& cfg, Rng& rng);

// Owns one RNG stream per noise source so that toggling one source never
// shifts another's draws.
class SensorSimulator {
 public:
  explicit SensorSimulator(const SensorConfig& cfg);

  // Call once per truth sample in time order; the bias steps by the elapsed time.
  SensorSample sample(const TruthSample& truth);

  const GyroBiasState& bias_state() const { return bias_; }

 private:
  SensorConfig cfg_;
  Rng accel_rng_;
  Rng gyro_rng_;
  Rng bias_rng_;
  Rng mag_rng_;
  GyroBiasState bias_;
  std::optional<double> last_t_;
};

}  // namespace attest
