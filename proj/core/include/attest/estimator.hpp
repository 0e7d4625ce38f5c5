#pragma once

// Uniform runtime interface over the three estimators so the harness can
// drive them with identical sensor streams.

#include <memory>
#include <optional>
#include <string_view>

#include "attest/cf.hpp"
#include "attest/ekf.hpp"
#include "attest/sensor_sim.hpp"
#include "attest/ukf.hpp"

namespace attest {

enum class EstimatorKind { Cf, Ekf, Ukf };

const char* to_string(EstimatorKind k);
std::optional<EstimatorKind> estimator_kind_from_name(std::string_view name);

// R for a unit-normalized direction whose raw sensor noise is alpha on a
// reference of magnitude ref_norm: (alpha / ref_norm)^2 I.
Mat3 unit_direction_noise(double alpha, double ref_norm);

// Q = diag(alpha^2 I, beta^2 / 60 I); alpha in rad/s, beta in rad/s per minute.
Mat6 process_noise(double alpha, double beta_per_min);

struct EstimatorParams {
  GainSchedule<CfGains> cf;
  GainSchedule<KalmanGains> ekf;
  GainSchedule<KalmanGains> ukf;
  Mat6 q_ekf = Mat6::Zero();
  Mat6 q_ukf = Mat6::Zero();
  double ukf_lambda = 1.0;
  double p0_att = 1.0 * kDegToRad;   // rad
  double p0_bias = 0.5 * kDegToRad;  // rad/s

  // Tuned defaults; R is scaled by the gravity and field magnitudes.
  static EstimatorParams defaults(double gravity_norm, double field_norm);
  static EstimatorParams defaults();

  Mat6 initial_covariance() const;
  void validate() const;
};

// Raw readings for one tick plus what the estimator knows about the field.
struct TickInput {
  Vec3 accel = Vec3::Zero();
  Vec3 mag = Vec3::Zero();
  Vec3 gravity = Vec3(0.0, 0.0, 9.81);
  MagUsage mag_usage = MagUsage::None;
  MagReference mag_ref;
};

struct UpdateCounters {
  std::size_t propagations = 0;
  std::size_t accel_updates = 0;
  std::size_t mag_updates = 0;

  bool operator==(const UpdateCounters&) const = default;
};

class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual EstimatorKind kind() const = 0;
  virtual void propagate(const Vec3& omega_g, double dt) = 0;
  // Accel update then, if enabled, the magnetometer update.
  virtual void correct(const TickInput& in, bool low_dynamics) = 0;
  virtual Quaternion attitude() const = 0;
  virtual Vec3 bias() const = 0;
  // Zero for the complementary filter.
  virtual Mat6 covariance() const { return Mat6::Zero(); }

  const UpdateCounters& counters() const { return counters_; }

 protected:
  UpdateCounters counters_;
};

std::unique_ptr<Estimator> make_estimator(EstimatorKind kind, const EstimatorParams& params, bool dynamic_gains,
                                          const Quaternion& q0, const Vec3& b0 = Vec3::Zero());

}  // namespace attest
