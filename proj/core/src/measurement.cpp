#include "attest/measurement.hpp"

#include <cmath>
#include <numeric>

namespace attest {

namespace {
constexpr double kMinNorm = 1e-6;
}

const char* to_string(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::Accel:
      return "accel";
    case ObservationKind::MagHorizontal:
      return "mag_horizontal";
    case ObservationKind::Mag3D:
      return "mag_xyz";
  }
  return "?";
}

const char* to_string(MagFieldKnowledge k) {
  return k == MagFieldKnowledge::Xyz ? "xyz" : "declination_only";
}

const char* to_string(MagUsage u) {
  switch (u) {
    case MagUsage::None:
      return "none";
    case MagUsage::Horizontal:
      return "horizontal";
    case MagUsage::Xyz:
      return "xyz";
  }
  return "?";
}

Vec3 predicted_body_vector(const VectorObservation& obs, const Quaternion& q_hat) {
  const Vec3 v = quat_to_dcm(q_hat).transpose() * obs.v_ref_N;
  if (obs.projection) return (*obs.projection * v).normalized();
  return v.normalized();
}

Mat3 measurement_jacobian(const VectorObservation& obs, const Vec3& v_body_hat) {
  if (obs.kind == ObservationKind::MagHorizontal && obs.projection)
    return *obs.projection * cross_matrix(obs.xi_bar);
  return cross_matrix(v_body_hat);
}

Mat3 perpendicular_projector(const Vec3& mu) {
  const Vec3 m = mu.normalized();
  return Mat3::Identity() - m * m.transpose();
}

VectorObservation accel_observation(const Vec3& xi_accel, const Vec3& gravity,
                                    const std::optional<Vec3>& rddot_est) {
  const double n = xi_accel.norm();
  if (!(n >= kMinNorm)) throw DegenerateInput("accelerometer sample has (near) zero norm");
  const Vec3 ref = gravity + rddot_est.value_or(Vec3::Zero());
  if (!(ref.norm() >= kMinNorm)) throw DegenerateInput("accelerometer reference g + rddot is zero");
  VectorObservation obs;
  obs.kind = ObservationKind::Accel;
  obs.xi_bar = xi_accel / n;
  obs.v_ref_N = ref;
  return obs;
}

MagReference MagReference::from_declination(double declination_rad) {
  MagReference r;
  r.knowledge = MagFieldKnowledge::DeclinationOnly;
  r.declination = declination_rad;
  r.field = Vec3(std::cos(declination_rad), std::sin(declination_rad), 0.0);
  return r;
}

MagReference MagReference::from_field(const Vec3& field) {
  MagReference r;
  r.knowledge = MagFieldKnowledge::Xyz;
  r.field = field;
  r.declination = std::atan2(field.y(), field.x());
  return r;
}

Vec3 MagReference::horizontal_unit() const {
  if (knowledge == MagFieldKnowledge::DeclinationOnly)
    return {std::cos(declination), std::sin(declination), 0.0};
  const Vec3 h(field.x(), field.y(), 0.0);
  if (!(h.norm() >= kMinNorm)) throw DegenerateInput("reference field is (nearly) vertical");
  return h.normalized();
}

VectorObservation mag_observation(const Vec3& xi_mag, const Quaternion& q_hat, const MagReference& ref,
                                  MagUsage usage) {
  const double n = xi_mag.norm();
  if (!(n >= kMinNorm)) throw DegenerateInput("magnetometer sample has (near) zero norm");
  VectorObservation obs;
  if (usage == MagUsage::Xyz) {
    if (ref.knowledge != MagFieldKnowledge::Xyz)
      throw ConfigError("3-axis magnetometer usage needs full field knowledge");
    obs.kind = ObservationKind::Mag3D;
    obs.xi_bar = xi_mag / n;
    obs.v_ref_N = ref.field.normalized();
    obs.projection = Mat3::Identity();
    return obs;
  }
  if (usage != MagUsage::Horizontal) throw ConfigError("magnetometer usage is none");

  const Mat3 c_nb = quat_to_dcm(q_hat);
  const Mat3 c_mu = perpendicular_projector(Vec3::UnitZ());
  const Mat3 chain = c_nb.transpose() * c_mu * c_nb;
  const Vec3 projected = chain * (xi_mag / n);
  if (!(projected.norm() >= kMinNorm)) throw DegenerateInput("measured field is (nearly) vertical");

  obs.kind = ObservationKind::MagHorizontal;
  obs.xi_bar = projected.normalized();
  obs.v_ref_N = ref.horizontal_unit();
  obs.projection = chain;
  return obs;
}

DetectorState::DetectorState(const DetectorConfig& cfg, double rate)
    : window_(static_cast<std::size_t>(std::max(1.0, std::round(cfg.window_s * rate))), 0.0) {}

void DetectorState::update(const Vec3& accel, const DetectorConfig& cfg) {
  if (window_.empty()) window_.assign(1, 0.0);
  mu_ = std::abs(accel.norm() - cfg.gravity_norm);
  if (mu_ > cfg.t_high) {
    // Reset: the whole averaging window restarts at the current deviation.
    std::fill(window_.begin(), window_.end(), mu_);
    filled_ = window_.size();
    head_ = 0;
  } else {
    window_[head_] = mu_;
    head_ = (head_ + 1) % window_.size();
    filled_ = std::min(filled_ + 1, window_.size());
  }
  const double sum = filled_ == window_.size()
                         ? std::accumulate(window_.begin(), window_.end(), 0.0)
                         : std::accumulate(window_.begin(), window_.begin() + static_cast<std::ptrdiff_t>(filled_), 0.0);
  mu_f_ = sum / static_cast<double>(filled_);
  low_dynamics_ = filled_ == window_.size() && mu_f_ < cfg.t_low;
}

DetectorState detector_update(DetectorState state, const Vec3& accel, const DetectorConfig& cfg) {
  state.update(accel, cfg);
  return state;
}

}  // namespace attest
