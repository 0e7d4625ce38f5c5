#pragma once

#include "attest/measurement.hpp"

namespace attest {

using Mat63 = Eigen::Matrix<double, 6, 3>;

// Multiplicative EKF state. P is the covariance of [da; db], where the true
// attitude is q_hat (x) q(da).
struct EkfState {
  Quaternion q_hat;
  Vec3 b_hat = Vec3::Zero();
  Mat6 P = Mat6::Identity();
};

// Measurement noise per sensor, expressed for unit-normalized directions.
struct KalmanGains {
  Mat3 r_accel = Mat3::Identity();
  Mat3 r_mag = Mat3::Identity();

  const Mat3& for_kind(ObservationKind kind) const {
    return kind == ObservationKind::Accel ? r_accel : r_mag;
  }
};

// Symmetry and PSD tolerance applied after every covariance operation.
inline constexpr double kCovarianceTolerance = 1e-9;

// Throws CovarianceError when P is not symmetric or has an eigenvalue below
// -kCovarianceTolerance.
void check_covariance(const Mat6& P);
Mat6 symmetrized(const Mat6& P);

// F = [[-1/2 [w x], -I], [0, 0]] with w = omega_g - b_hat.
Mat6 ekf_process_jacobian(const Vec3& omega);

// P_dot = F P + P F^T + Q.
Mat6 ekf_covariance_rate(const Mat6& P, const Vec3& omega, const Mat6& Q);

// Quaternion by second-order delta update, P by one Euler step of the
// covariance rate, then symmetrized and checked.
EkfState ekf_propagate(const EkfState& state, const Vec3& omega_g, double dt, const Mat6& Q);

// K = [P_aa; P_ab^T] H^T (H P_aa H^T + R)^-1. Throws SingularInnovation.
Mat63 ekf_gain(const Mat6& P, const Mat3& H, const Mat3& R);

EkfState ekf_update(const EkfState& state, const VectorObservation& obs, const Mat3& R);

}  // namespace attest
