#include "attest/ukf.hpp"

#include <cmath>
#include <sstream>

namespace attest {

void UkfConfig::validate() const {
  if (!(kStateDim + lambda > 0.0)) throw ConfigError("UKF requires n + lambda > 0");
  if ((Q.diagonal().array() < 0.0).any()) throw ConfigError("process noise diagonal must be >= 0");
}

SigmaMatrix ukf_sigma_points(const Mat6& P, const Mat6& Q, double dt, double lambda) {
  const Mat6 A = (kStateDim + lambda) * symmetrized(P + dt * Q);
  Eigen::LLT<Mat6> llt(A);
  if (llt.info() != Eigen::Success) {
    llt.compute(A + 1e-12 * Mat6::Identity());
    if (llt.info() != Eigen::Success) throw CholeskyError("sigma-point covariance is not positive definite");
  }
  const Mat6 L = llt.matrixL();
  SigmaMatrix out;
  out.leftCols<kStateDim>() = L;
  out.rightCols<kStateDim>() = -L;
  return out;
}

namespace {

// Attitude part of the sigma perturbation relative to `center`; exact inverse
// of q = center (x) normalize([1, da/2]).
Vec3 recover_perturbation(const Quaternion& center, const Quaternion& q) {
  Quaternion r = quat_mult(quat_conjugate(center), q);
  if (r.w < 0.0) r = -r;
  if (r.w < kMinSigmaScalar) {
    std::ostringstream os;
    os << "sigma point drifted from the mean (scalar part " << r.w << ")";
    throw QuaternionDivergence(os.str());
  }
  return 2.0 * r.v / r.w;
}

}  // namespace

UkfState ukf_propagate(const UkfState& state, const Vec3& omega_g, double dt, const UkfConfig& cfg) {
  const SigmaMatrix points = ukf_sigma_points(state.P, cfg.Q, dt, cfg.lambda);

  SigmaSet set;
  set.lambda = cfg.lambda;
  for (int i = 0; i <= kSigmaCount; ++i) {
    const Vec6 dx = i == 0 ? Vec6::Zero() : Vec6(points.col(i - 1));
    const Quaternion q_i =
        i == 0 ? state.q_hat : quat_mult(state.q_hat, small_angle_quat(dx.head<3>(), 1)).normalized();
    const Vec3 omega_i = omega_g - (state.b_hat + dx.tail<3>());
    set.q[i] = quat_delta_update(q_i, omega_i * dt, 2);
    set.dx[i].tail<3>() = dx.tail<3>();
  }

  set.dx[0].setZero();
  Vec6 sum = Vec6::Zero();
  for (int i = 1; i <= kSigmaCount; ++i) {
    set.dx[i].head<3>() = recover_perturbation(set.q[0], set.q[i]);
    sum += set.dx[i];
  }
  const double inv = 1.0 / (kStateDim + cfg.lambda);
  set.mean = inv * 0.5 * sum;

  Mat6 P = cfg.lambda * set.mean * set.mean.transpose();
  for (int i = 1; i <= kSigmaCount; ++i) {
    const Vec6 d = set.dx[i] - set.mean;
    P += 0.5 * d * d.transpose();
  }
  P *= inv;

  UkfState out;
  out.q_hat = quat_delta_update(set.q[0], set.mean.head<3>(), 1);
  out.b_hat = state.b_hat + set.mean.tail<3>();
  out.P = symmetrized(P);
  check_covariance(out.P);
  out.sigma = set;
  return out;
}

UkfState ukf_update(const UkfState& state, const VectorObservation& obs, const Mat3& R) {
  if (!state.sigma) throw Error("UKF measurement update requires a preceding propagation");
  return ukf_update(state, obs, R, *state.sigma);
}

UkfState ukf_update(const UkfState& state, const VectorObservation& obs, const Mat3& R, const SigmaSet& sigma) {
  const double w0 = sigma.weight_center();
  const double wi = sigma.weight_side();

  std::array<Vec3, kSigmaCount + 1> xi;
  Vec3 xi_mean = Vec3::Zero();
  for (int i = 0; i <= kSigmaCount; ++i) {
    xi[i] = predicted_body_vector(obs, sigma.q[i]);
    xi_mean += (i == 0 ? w0 : wi) * xi[i];
  }

  Mat3 P_xixi = Mat3::Zero();
  Mat63 P_xxi = Mat63::Zero();
  for (int i = 0; i <= kSigmaCount; ++i) {
    const double w = i == 0 ? w0 : wi;
    const Vec3 dxi = xi[i] - xi_mean;
    P_xixi += w * dxi * dxi.transpose();
    P_xxi += w * (sigma.dx[i] - sigma.mean) * dxi.transpose();
  }

  const Mat3 S = P_xixi + R;
  Eigen::FullPivLU<Mat3> lu(S);
  if (!lu.isInvertible() || !std::isfinite(lu.rcond()) || lu.rcond() < 1e-14)
    throw SingularInnovation("innovation covariance is singular");
  const Mat63 K = P_xxi * lu.inverse();
  const Vec3 innovation = obs.xi_bar - xi_mean.normalized();
  const Vec6 dx = K * innovation;

  UkfState out;
  out.b_hat = state.b_hat + dx.tail<3>();
  out.q_hat = quat_delta_update(state.q_hat, dx.head<3>(), 1);
  out.P = symmetrized(state.P - K * S * K.transpose());
  check_covariance(out.P);
  out.sigma = state.sigma;
  return out;
}

}  // namespace attest
