#include "attest/cf.hpp"

namespace attest {

void CfWeights::validate() const {
  const auto in_unit = [](const Vec3& w) { return (w.array() >= 0.0).all() && (w.array() <= 1.0).all(); };
  if (!in_unit(w_a) || !in_unit(w_b)) throw ConfigError("complementary filter weights must lie in [0, 1]");
}

CfState cf_propagate(const CfState& state, const Vec3& omega_g, double dt) {
  CfState out = state;
  out.q_hat = quat_delta_update(state.q_hat, (omega_g - state.b_hat) * dt, 2);
  return out;
}

Vec3 cf_delta_theta(const VectorObservation& obs, const Quaternion& q_hat) {
  return obs.xi_bar.cross(predicted_body_vector(obs, q_hat));
}

CfState cf_update(const CfState& state, std::span<const VectorObservation> obs,
                  std::span<const CfWeights> weights) {
  if (obs.size() != weights.size()) throw ConfigError("one weight set is required per observation");
  Vec3 da = Vec3::Zero();
  Vec3 db = Vec3::Zero();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Vec3 contribution = weights[i].w_a.cwiseProduct(cf_delta_theta(obs[i], state.q_hat));
    da += contribution;
    db -= weights[i].w_b.cwiseProduct(contribution);
  }
  CfState out;
  out.b_hat = state.b_hat + db;
  out.q_hat = quat_delta_update(state.q_hat, da, 1);
  return out;
}

ScalarCfWeights simplified_ekf_weights(double phi, double psi, double rho) {
  if (!(phi > 0.0) || !(rho > 0.0)) throw DomainError("phi and rho must be positive");
  if (psi < 0.0) throw DomainError("psi must be non-negative");
  return {1.0 / (1.0 + rho / phi), psi / phi};
}

}  // namespace attest
