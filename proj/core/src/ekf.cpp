#include "attest/ekf.hpp"

#include <cmath>
#include <sstream>

namespace attest {

Mat6 symmetrized(const Mat6& P) { return 0.5 * (P + P.transpose()); }

void check_covariance(const Mat6& P) {
  if (!P.allFinite()) throw CovarianceError("covariance has non-finite entries");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > kCovarianceTolerance)
    throw CovarianceError("covariance lost symmetry");
  const double min_eig = Eigen::SelfAdjointEigenSolver<Mat6>(P, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (min_eig < -kCovarianceTolerance) {
    std::ostringstream os;
    os << "covariance lost positive semi-definiteness (min eigenvalue " << min_eig << ")";
    throw CovarianceError(os.str());
  }
}

Mat6 ekf_process_jacobian(const Vec3& omega) {
  Mat6 F = Mat6::Zero();
  F.topLeftCorner<3, 3>() = -0.5 * cross_matrix(omega);
  F.topRightCorner<3, 3>() = -Mat3::Identity();
  return F;
}

Mat6 ekf_covariance_rate(const Mat6& P, const Vec3& omega, const Mat6& Q) {
  const Mat6 F = ekf_process_jacobian(omega);
  return F * P + P * F.transpose() + Q;
}

EkfState ekf_propagate(const EkfState& state, const Vec3& omega_g, double dt, const Mat6& Q) {
  const Vec3 omega = omega_g - state.b_hat;
  EkfState out = state;
  out.q_hat = quat_delta_update(state.q_hat, omega * dt, 2);
  out.P = symmetrized(state.P + dt * ekf_covariance_rate(state.P, omega, Q));
  check_covariance(out.P);
  return out;
}

Mat63 ekf_gain(const Mat6& P, const Mat3& H, const Mat3& R) {
  const Mat3 P_aa = P.topLeftCorner<3, 3>();
  const Mat3 S = H * P_aa * H.transpose() + R;
  Eigen::FullPivLU<Mat3> lu(S);
  if (!lu.isInvertible() || !std::isfinite(lu.rcond()) || lu.rcond() < 1e-14)
    throw SingularInnovation("innovation covariance is singular");
  Mat63 PHt;
  PHt.topRows<3>() = P_aa * H.transpose();
  PHt.bottomRows<3>() = P.topRightCorner<3, 3>().transpose() * H.transpose();
  return PHt * lu.inverse();
}

EkfState ekf_update(const EkfState& state, const VectorObservation& obs, const Mat3& R) {
  const Vec3 v_hat = predicted_body_vector(obs, state.q_hat);
  const Mat3 H = measurement_jacobian(obs, v_hat);
  const Mat63 K = ekf_gain(state.P, H, R);
  const Vec6 dx = K * (obs.xi_bar - v_hat);

  EkfState out;
  out.b_hat = state.b_hat + dx.tail<3>();
  out.q_hat = quat_delta_update(state.q_hat, dx.head<3>(), 1);
  out.P = symmetrized(state.P - K * H * state.P.topRows<3>());
  check_covariance(out.P);
  return out;
}

}  // namespace attest
