#pragma once

#include <array>
#include <optional>

#include "attest/ekf.hpp"

namespace attest {

inline constexpr int kStateDim = 6;
inline constexpr int kSigmaCount = 2 * kStateDim;  // excluding the central point

using SigmaMatrix = Eigen::Matrix<double, kStateDim, kSigmaCount>;

// Propagated sigma set kept between propagation and measurement updates.
// Index 0 is the central point; dx[0] is zero by construction.
struct SigmaSet {
  std::array<Quaternion, kSigmaCount + 1> q;
  std::array<Vec6, kSigmaCount + 1> dx;
  Vec6 mean = Vec6::Zero();
  double lambda = 1.0;

  double weight_center() const { return lambda / (kStateDim + lambda); }
  double weight_side() const { return 1.0 / (2.0 * (kStateDim + lambda)); }
};

struct UkfState {
  Quaternion q_hat;
  Vec3 b_hat = Vec3::Zero();
  Mat6 P = Mat6::Identity();
  std::optional<SigmaSet> sigma;  // from the most recent propagation
};

struct UkfConfig {
  double lambda = 1.0;
  Mat6 Q = Mat6::Zero();

  void validate() const;
};

// Recovered sigma-point quaternions whose scalar part drops below this are
// treated as a divergence (spread too large for the small-angle map).
inline constexpr double kMinSigmaScalar = 0.9;

// Columns of +/- chol((n + lambda)(P + dt Q)). A failed factorization is
// retried once with 1e-12 I added; throws CholeskyError after that.
SigmaMatrix ukf_sigma_points(const Mat6& P, const Mat6& Q, double dt, double lambda);

UkfState ukf_propagate(const UkfState& state, const Vec3& omega_g, double dt, const UkfConfig& cfg);

// Uses the sigma set stored by the last ukf_propagate.
UkfState ukf_update(const UkfState& state, const VectorObservation& obs, const Mat3& R);
UkfState ukf_update(const UkfState& state, const VectorObservation& obs, const Mat3& R, const SigmaSet& sigma);

}  // namespace attest
