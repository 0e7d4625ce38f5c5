#pragma once

#include <span>

#include "attest/measurement.hpp"

namespace attest {

struct CfState {
  Quaternion q_hat;
  Vec3 b_hat = Vec3::Zero();  // rad/s
};

// Per-axis measurement weights, each component in [0, 1].
struct CfWeights {
  Vec3 w_a = Vec3::Zero();
  Vec3 w_b = Vec3::Zero();

  void validate() const;
};

// One weight pair per sensor; MagHorizontal and Mag3D share `mag`.
struct CfGains {
  CfWeights accel;
  CfWeights mag;

  const CfWeights& for_kind(ObservationKind kind) const {
    return kind == ObservationKind::Accel ? accel : mag;
  }
};

CfState cf_propagate(const CfState& state, const Vec3& omega_g, double dt);

// Small rotation between measured and predicted direction: xi_bar x v_B^.
Vec3 cf_delta_theta(const VectorObservation& obs, const Quaternion& q_hat);

// Linear combination of all observations in one tick:
//   da = sum_i w_a,i o dtheta_i,   db = -sum_i w_b,i o (w_a,i o dtheta_i)
// then b^ += db and q^ is updated with da.
CfState cf_update(const CfState& state, std::span<const VectorObservation> obs,
                  std::span<const CfWeights> weights);

struct ScalarCfWeights {
  double w_a = 0.0;
  double w_b = 0.0;
};

// Steady-state EKF with P_aa = phi I, P_ab = -psi I, R = rho I collapses to a
// complementary filter with w_a = 1/(1 + rho/phi), w_b = psi/phi.
ScalarCfWeights simplified_ekf_weights(double phi, double psi, double rho);

}  // namespace attest
