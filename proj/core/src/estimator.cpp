#include "attest/estimator.hpp"

#include <vector>

namespace attest {

const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Cf:
      return "cf";
    case EstimatorKind::Ekf:
      return "ekf";
    case EstimatorKind::Ukf:
      return "ukf";
  }
  return "?";
}

std::optional<EstimatorKind> estimator_kind_from_name(std::string_view name) {
  for (EstimatorKind k : {EstimatorKind::Cf, EstimatorKind::Ekf, EstimatorKind::Ukf}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

Mat3 unit_direction_noise(double alpha, double ref_norm) {
  if (!(ref_norm > 0.0)) throw ConfigError("reference magnitude must be positive");
  const double s = alpha / ref_norm;
  return s * s * Mat3::Identity();
}

Mat6 process_noise(double alpha, double beta_per_min) {
  Mat6 q = Mat6::Zero();
  q.diagonal().head<3>().setConstant(alpha * alpha);
  q.diagonal().tail<3>().setConstant(beta_per_min * beta_per_min / 60.0);
  return q;
}

EstimatorParams EstimatorParams::defaults(double gravity_norm, double field_norm) {
  EstimatorParams p;
  const auto weights = [](double wa, double wb) { return CfWeights{Vec3::Constant(wa), Vec3::Constant(wb)}; };
  p.cf.nominal = {weights(0.0002, 0.03), weights(0.002, 0.03)};
  p.cf.low_dynamics = CfGains{weights(0.002, 0.03), weights(0.02, 0.03)};

  const auto gains = [&](double accel, double mag) {
    return KalmanGains{unit_direction_noise(accel, gravity_norm), unit_direction_noise(mag, field_norm)};
  };
  p.ekf.nominal = gains(30.0, 0.47);
  p.ekf.low_dynamics = gains(4.9, 0.094);
  p.ukf.nominal = gains(10.0, 0.24);
  p.ukf.low_dynamics = gains(4.9, 0.094);

  p.q_ekf = process_noise(1.0 * kDegToRad, 0.5 * kDegToRad);
  p.q_ukf = p.q_ekf;
  return p;
}

EstimatorParams EstimatorParams::defaults() {
  const SensorConfig s;
  return defaults(s.gravity.norm(), s.mag_field.norm());
}

Mat6 EstimatorParams::initial_covariance() const {
  Mat6 P = Mat6::Zero();
  P.diagonal().head<3>().setConstant(p0_att * p0_att);
  P.diagonal().tail<3>().setConstant(p0_bias * p0_bias);
  return P;
}

void EstimatorParams::validate() const {
  cf.nominal.accel.validate();
  cf.nominal.mag.validate();
  if (cf.low_dynamics) {
    cf.low_dynamics->accel.validate();
    cf.low_dynamics->mag.validate();
  }
  const auto check_diag = [](const auto& m, const char* what) {
    if (!m.allFinite() || (m.diagonal().array() < 0.0).any())
      throw ConfigError(std::string(what) + " must have a non-negative diagonal");
  };
  for (const auto* g : {&ekf.nominal, &ukf.nominal}) {
    check_diag(g->r_accel, "R");
    check_diag(g->r_mag, "R");
  }
  check_diag(q_ekf, "Q");
  check_diag(q_ukf, "Q");
  UkfConfig{ukf_lambda, q_ukf}.validate();
  if (!(p0_att >= 0.0) || !(p0_bias >= 0.0)) throw ConfigError("initial standard deviations must be >= 0");
}

namespace {

class CfEstimator final : public Estimator {
 public:
  CfEstimator(const GainSchedule<CfGains>& g, bool dyn, const Quaternion& q0, const Vec3& b0)
      : gains_(g), dynamic_(dyn), state_{q0, b0} {}

  EstimatorKind kind() const override { return EstimatorKind::Cf; }

  void propagate(const Vec3& omega_g, double dt) override {
    state_ = cf_propagate(state_, omega_g, dt);
    ++counters_.propagations;
  }

  void correct(const TickInput& in, bool low) override {
    const CfGains& g = select_gains(gains_, low, dynamic_);
    std::vector<VectorObservation> obs{accel_observation(in.accel, in.gravity)};
    std::vector<CfWeights> w{g.accel};
    if (in.mag_usage != MagUsage::None) {
      obs.push_back(mag_observation(in.mag, state_.q_hat, in.mag_ref, in.mag_usage));
      w.push_back(g.mag);
    }
    state_ = cf_update(state_, obs, w);
    ++counters_.accel_updates;
    if (obs.size() > 1) ++counters_.mag_updates;
  }

  Quaternion attitude() const override { return state_.q_hat; }
  Vec3 bias() const override { return state_.b_hat; }

 private:
  GainSchedule<CfGains> gains_;
  bool dynamic_;
  CfState state_;
};

class EkfEstimator final : public Estimator {
 public:
  EkfEstimator(const GainSchedule<KalmanGains>& g, const Mat6& Q, bool dyn, const Quaternion& q0, const Vec3& b0,
               const Mat6& P0)
      : gains_(g), Q_(Q), dynamic_(dyn), state_{q0, b0, P0} {}

  EstimatorKind kind() const override { return EstimatorKind::Ekf; }

  void propagate(const Vec3& omega_g, double dt) override {
    state_ = ekf_propagate(state_, omega_g, dt, Q_);
    ++counters_.propagations;
  }

  void correct(const TickInput& in, bool low) override {
    const KalmanGains& g = select_gains(gains_, low, dynamic_);
    state_ = ekf_update(state_, accel_observation(in.accel, in.gravity), g.r_accel);
    ++counters_.accel_updates;
    if (in.mag_usage != MagUsage::None) {
      state_ = ekf_update(state_, mag_observation(in.mag, state_.q_hat, in.mag_ref, in.mag_usage), g.r_mag);
      ++counters_.mag_updates;
    }
  }

  Quaternion attitude() const override { return state_.q_hat; }
  Vec3 bias() const override { return state_.b_hat; }
  Mat6 covariance() const override { return state_.P; }

 private:
  GainSchedule<KalmanGains> gains_;
  Mat6 Q_;
  bool dynamic_;
  EkfState state_;
};

class UkfEstimator final : public Estimator {
 public:
  UkfEstimator(const GainSchedule<KalmanGains>& g, const UkfConfig& cfg, bool dyn, const Quaternion& q0,
               const Vec3& b0, const Mat6& P0)
      : gains_(g), cfg_(cfg), dynamic_(dyn) {
    state_.q_hat = q0;
    state_.b_hat = b0;
    state_.P = P0;
  }

  EstimatorKind kind() const override { return EstimatorKind::Ukf; }

  void propagate(const Vec3& omega_g, double dt) override {
    state_ = ukf_propagate(state_, omega_g, dt, cfg_);
    ++counters_.propagations;
  }

  void correct(const TickInput& in, bool low) override {
    const KalmanGains& g = select_gains(gains_, low, dynamic_);
    state_ = ukf_update(state_, accel_observation(in.accel, in.gravity), g.r_accel);
    ++counters_.accel_updates;
    if (in.mag_usage != MagUsage::None) {
      state_ = ukf_update(state_, mag_observation(in.mag, state_.q_hat, in.mag_ref, in.mag_usage), g.r_mag);
      ++counters_.mag_updates;
    }
  }

  Quaternion attitude() const override { return state_.q_hat; }
  Vec3 bias() const override { return state_.b_hat; }
  Mat6 covariance() const override { return state_.P; }

 private:
  GainSchedule<KalmanGains> gains_;
  UkfConfig cfg_;
  bool dynamic_;
  UkfState state_;
};

}  // namespace

std::unique_ptr<Estimator> make_estimator(EstimatorKind kind, const EstimatorParams& params, bool dynamic_gains,
                                          const Quaternion& q0, const Vec3& b0) {
  params.validate();
  const Quaternion q = q0.normalized();
  switch (kind) {
    case EstimatorKind::Cf:
      return std::make_unique<CfEstimator>(params.cf, dynamic_gains, q, b0);
    case EstimatorKind::Ekf:
      return std::make_unique<EkfEstimator>(params.ekf, params.q_ekf, dynamic_gains, q, b0,
                                            params.initial_covariance());
    case EstimatorKind::Ukf:
      return std::make_unique<UkfEstimator>(params.ukf, UkfConfig{params.ukf_lambda, params.q_ukf}, dynamic_gains, q,
                                            b0, params.initial_covariance());
  }
  throw ConfigError("unknown estimator kind");
}

}  // namespace attest
