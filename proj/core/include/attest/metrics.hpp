#pragma once

#include <span>

#include "attest/attitude.hpp"

namespace attest {

// ZYX convention: C = Rz(heading) Ry(pitch) Rx(roll). At gimbal lock the
// heading absorbs the remaining rotation through atan2.
struct EulerAngles {
  double heading = 0.0;  // (-pi, pi]
  double pitch = 0.0;    // [-pi/2, pi/2]
  double roll = 0.0;     // (-pi, pi]
};

EulerAngles euler_angles(const Quaternion& q);
Quaternion quat_from_euler(const EulerAngles& e);

// Error Euler vector of dq = q_hat* (x) q_true, body frame, |result| in [0, pi].
// Exactly zero for identical attitudes.
Vec3 error_euler_vector(const Quaternion& q_hat, const Quaternion& q_true);

// Estimate minus truth, each wrapped to (-pi, pi]. Ordered heading, pitch, roll.
Vec3 euler_angle_error(const Quaternion& q_hat, const Quaternion& q_true);

double wrap_angle(double a);

struct ErrorSample {
  double t = 0.0;
  Vec3 dav = Vec3::Zero();        // rad
  Vec3 euler_err = Vec3::Zero();  // heading, pitch, roll error, rad
  Vec3 bias_err = Vec3::Zero();   // estimate minus truth, rad/s
};

ErrorSample make_error_sample(double t, const Quaternion& q_hat, const Quaternion& q_true, const Vec3& b_hat,
                              const Vec3& b_true);

// All in degrees.
struct MetricsReport {
  double max_ev_z = 0.0;
  double max_ev_xy = 0.0;
  double fin_h = 0.0;
  double fin_pr = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

// Maxima over the whole series; Fin* from the last sample. Throws EmptySeries.
MetricsReport compute_metrics(std::span<const ErrorSample> series);

}  // namespace attest
