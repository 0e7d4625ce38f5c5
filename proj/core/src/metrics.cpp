#include "attest/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "attest/sensor_sim.hpp"

namespace attest {

namespace {
constexpr double kPi = 3.141592653589793;
}

EulerAngles euler_angles(const Quaternion& q) {
  const Mat3 c = quat_to_dcm(q.normalized());
  EulerAngles e;
  e.heading = std::atan2(c(1, 0), c(0, 0));
  e.pitch = -std::asin(std::clamp(c(2, 0), -1.0, 1.0));
  e.roll = std::atan2(c(2, 1), c(2, 2));
  return e;
}

Quaternion quat_from_euler(const EulerAngles& e) {
  const Quaternion qz(std::cos(e.heading / 2), 0.0, 0.0, std::sin(e.heading / 2));
  const Quaternion qy(std::cos(e.pitch / 2), 0.0, std::sin(e.pitch / 2), 0.0);
  const Quaternion qx(std::cos(e.roll / 2), std::sin(e.roll / 2), 0.0, 0.0);
  return qz * qy * qx;
}

Vec3 error_euler_vector(const Quaternion& q_hat, const Quaternion& q_true) {
  Quaternion dq = quat_mult(quat_conjugate(q_hat), q_true).normalized();
  if (dq.w < 0.0) dq = -dq;
  const double s = dq.v.norm();
  if (s == 0.0) return Vec3::Zero();
  const double phi = 2.0 * std::atan2(s, dq.w);
  return (phi / s) * dq.v;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

Vec3 euler_angle_error(const Quaternion& q_hat, const Quaternion& q_true) {
  const EulerAngles e = euler_angles(q_hat);
  const EulerAngles t = euler_angles(q_true);
  return {wrap_angle(e.heading - t.heading), wrap_angle(e.pitch - t.pitch), wrap_angle(e.roll - t.roll)};
}

ErrorSample make_error_sample(double t, const Quaternion& q_hat, const Quaternion& q_true, const Vec3& b_hat,
                              const Vec3& b_true) {
  return {t, error_euler_vector(q_hat, q_true), euler_angle_error(q_hat, q_true), b_hat - b_true};
}

MetricsReport compute_metrics(std::span<const ErrorSample> series) {
  if (series.empty()) throw EmptySeries("metrics need at least one error sample");
  MetricsReport m;
  for (const ErrorSample& s : series) {
    m.max_ev_z = std::max(m.max_ev_z, std::abs(s.dav.z()));
    m.max_ev_xy = std::max({m.max_ev_xy, std::abs(s.dav.x()), std::abs(s.dav.y())});
  }
  const ErrorSample& last = series.back();
  m.max_ev_z *= kRadToDeg;
  m.max_ev_xy *= kRadToDeg;
  m.fin_h = std::abs(last.euler_err(0)) * kRadToDeg;
  m.fin_pr = std::max(std::abs(last.euler_err(1)), std::abs(last.euler_err(2))) * kRadToDeg;
  return m;
}

}  // namespace attest
