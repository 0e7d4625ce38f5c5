#pragma once

// Turns raw accelerometer / magnetometer readings into normalized vector
// observations, plus the low-dynamics detector and gain scheduling.

#include <optional>
#include <vector>

#include "attest/attitude.hpp"

namespace attest {

enum class ObservationKind { Accel, MagHorizontal, Mag3D };

const char* to_string(ObservationKind kind);

struct VectorObservation {
  Vec3 xi_bar = Vec3::UnitZ();   // measured direction, body frame, unit
  Vec3 v_ref_N = Vec3::UnitZ();  // known reference, inertial frame
  ObservationKind kind = ObservationKind::Accel;
  // For MagHorizontal: B^C^N * C_mu * N^C^B^, the body-frame chain that drops
  // the component along the vertical.
  std::optional<Mat3> projection;
};

// Reference direction predicted in the body frame of q_hat, passed through
// obs.projection when present, unit length.
Vec3 predicted_body_vector(const VectorObservation& obs, const Quaternion& q_hat);

// Linearized measurement matrix H_a for the attitude perturbation.
// Accel / Mag3D: [v_B^ x]. MagHorizontal: projection * [xi_bar x].
Mat3 measurement_jacobian(const VectorObservation& obs, const Vec3& v_body_hat);

// I - mu mu^T, projects out the component along the unit vector mu.
Mat3 perpendicular_projector(const Vec3& mu);

// rddot_est defaults to zero. Throws DegenerateInput for a free-fall sample or
// a zero reference (g + rddot_est = 0).
VectorObservation accel_observation(const Vec3& xi_accel, const Vec3& gravity,
                                    const std::optional<Vec3>& rddot_est = std::nullopt);

enum class MagFieldKnowledge { DeclinationOnly, Xyz };
enum class MagUsage { None, Horizontal, Xyz };

const char* to_string(MagFieldKnowledge k);
const char* to_string(MagUsage u);

// What the estimator knows about the local field.
struct MagReference {
  MagFieldKnowledge knowledge = MagFieldKnowledge::DeclinationOnly;
  Vec3 field = Vec3::UnitX();   // full field (xyz knowledge)
  double declination = 0.0;     // rad, from +x toward +y in the horizontal plane

  static MagReference from_declination(double declination_rad);
  static MagReference from_field(const Vec3& field);

  // Unit horizontal direction of the field in the inertial frame.
  Vec3 horizontal_unit() const;
};

// usage must be Horizontal or Xyz; Xyz requires full-field knowledge.
// Throws DegenerateInput when the measured or reference field has (almost) no
// horizontal component.
VectorObservation mag_observation(const Vec3& xi_mag, const Quaternion& q_hat, const MagReference& ref,
                                  MagUsage usage);

struct DetectorConfig {
  double t_high = 2.0;      // m/s^2
  double t_low = 0.7;       // m/s^2
  double window_s = 5.0;    // moving-average span
  double gravity_norm = 9.81;
};

// Flags low-dynamics motion from the deviation of |accel| from |g|. The flag
// stays false until a full window of samples has accumulated.
class DetectorState {
 public:
  DetectorState() = default;
  DetectorState(const DetectorConfig& cfg, double rate);

  void update(const Vec3& accel, const DetectorConfig& cfg);

  double mu() const { return mu_; }
  double mu_f() const { return mu_f_; }
  bool low_dynamics() const { return low_dynamics_; }
  std::size_t window_length() const { return window_.size(); }
  std::size_t filled() const { return filled_; }

 private:
  std::vector<double> window_;
  std::size_t head_ = 0;
  std::size_t filled_ = 0;
  double mu_ = 0.0;
  double mu_f_ = 0.0;
  bool low_dynamics_ = false;
};

DetectorState detector_update(DetectorState state, const Vec3& accel, const DetectorConfig& cfg);

template <class Params>
struct GainSchedule {
  Params nominal;
  std::optional<Params> low_dynamics;
};

// Low-dynamics set iff the detector says so and dynamic gains are enabled.
template <class Params>
const Params& select_gains(const GainSchedule<Params>& schedule, bool low_dynamics, bool dynamic_gains_on) {
  if (low_dynamics && dynamic_gains_on) {
    if (!schedule.low_dynamics) throw ConfigError("dynamic gains enabled without a low-dynamics parameter set");
    return *schedule.low_dynamics;
  }
  return schedule.nominal;
}

}  // namespace attest
