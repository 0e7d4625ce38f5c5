#include "attest/attitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace attest {

namespace {

constexpr double kPi = std::numbers::pi;

// Rotation angle of a unit quaternion with q0 >= 0, accurate near zero.
double half_angle(const Quaternion& q) { return std::atan2(q.v.norm(), q.w); }

// phi / sin(phi/2) with the phi -> 0 limit of 2.
double angle_over_half_sine(double phi) {
  if (phi < 1e-6) return 2.0 + phi * phi / 12.0;
  return phi / std::sin(0.5 * phi);
}

}  // namespace

const char* to_string(Rep rep) {
  switch (rep) {
    case Rep::EulerVector:
      return "euler_vector";
    case Rep::Gibbs:
      return "gibbs";
    case Rep::MRP:
      return "mrp";
  }
  return "?";
}

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {w / n, v / n};
}

AttitudeVec3::AttitudeVec3(Rep rep_, const Vec3& a_) : rep(rep_), a(a_) {
  if (!a.allFinite()) throw DomainError("attitude vector has non-finite components");
  if (rep == Rep::EulerVector) {
    const double n = a.norm();
    if (n > kPi) {
      double phi = std::fmod(n, 2.0 * kPi);
      const Vec3 e = a / n;
      a = phi > kPi ? Vec3(-(2.0 * kPi - phi) * e) : Vec3(phi * e);
    }
  } else if (rep == Rep::Gibbs) {
    if (kPi - angle() < kGibbsSingularityMargin)
      throw DomainError("Gibbs vector undefined at a half-turn rotation");
  }
}

double AttitudeVec3::angle() const {
  const double n = a.norm();
  switch (rep) {
    case Rep::EulerVector:
      return n;
    case Rep::Gibbs:
      return 2.0 * std::atan(0.5 * n);
    case Rep::MRP:
      return 4.0 * std::atan(0.25 * n);
  }
  return n;
}

Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Quaternion quat_mult(const Quaternion& q, const Quaternion& p) {
  return {q.w * p.w - q.v.dot(p.v), q.w * p.v + p.w * q.v + q.v.cross(p.v)};
}

Quaternion quat_conjugate(const Quaternion& q) { return {q.w, -q.v}; }

Vec3 quat_transform(const Quaternion& q, const Vec3& v_body) {
  return quat_mult(quat_mult(q, Quaternion(0.0, v_body)), quat_conjugate(q)).v;
}

Dcm quat_to_dcm(const Quaternion& q) {
  const Mat3 qx = cross_matrix(q.v);
  return (q.w * q.w - q.v.squaredNorm()) * Mat3::Identity() + 2.0 * q.w * qx +
         2.0 * q.v * q.v.transpose();
}

Quaternion vec3_to_quat(const AttitudeVec3& v) {
  const Vec3& a = v.a;
  switch (v.rep) {
    case Rep::EulerVector: {
      const double alpha = 0.5 * a.norm();
      // sin(alpha) / (2 alpha) -> 1/2 as alpha -> 0
      const double s = alpha < 1e-8 ? 0.5 * (1.0 - alpha * alpha / 6.0) : std::sin(alpha) / (2.0 * alpha);
      return {std::cos(alpha), s * a};
    }
    case Rep::Gibbs: {
      if (kPi - v.angle() < kGibbsSingularityMargin)
        throw DomainError("Gibbs vector undefined at a half-turn rotation");
      const double alpha = 0.25 * a.squaredNorm();
      return Quaternion(1.0, 0.5 * a) * (1.0 / std::sqrt(1.0 + alpha));
    }
    case Rep::MRP: {
      const double alpha = a.squaredNorm() / 16.0;
      return Quaternion(1.0 - alpha, 0.5 * a) * (1.0 / (1.0 + alpha));
    }
  }
  return {};
}

AttitudeVec3 quat_to_vec3(Rep rep, const Quaternion& q_in) {
  Quaternion q = q_in.normalized();
  if (q.w < 0.0) q = -q;
  switch (rep) {
    case Rep::EulerVector: {
      const double phi = 2.0 * half_angle(q);
      AttitudeVec3 out;
      out.rep = rep;
      out.a = angle_over_half_sine(phi) * q.v;
      return out;
    }
    case Rep::Gibbs:
      if (q.w < std::sin(0.5 * kGibbsSingularityMargin))
        throw DomainError("Gibbs vector undefined at a half-turn rotation");
      return {rep, 2.0 * q.v / q.w};
    case Rep::MRP:
      // 4 tan(phi/4) e = 4 qv / (1 + q0)
      return {rep, 4.0 * q.v / (1.0 + q.w)};
  }
  return {};
}

Dcm vec3_to_dcm(const AttitudeVec3& v) {
  const Vec3& a = v.a;
  const Mat3 I = Mat3::Identity();
  switch (v.rep) {
    case Rep::EulerVector: {
      const double phi = a.norm();
      if (phi == 0.0) return I;
      const Mat3 ex = cross_matrix(a / phi);
      return I + std::sin(phi) * ex + (1.0 - std::cos(phi)) * ex * ex;
    }
    case Rep::Gibbs: {
      if (kPi - v.angle() < kGibbsSingularityMargin)
        throw DomainError("Gibbs vector undefined at a half-turn rotation");
      const double alpha = 0.25 * a.squaredNorm();
      const Mat3 ax = cross_matrix(a);
      return I + ax / (1.0 + alpha) + ax * ax / (2.0 * (1.0 + alpha));
    }
    case Rep::MRP: {
      const double alpha = a.squaredNorm() / 16.0;
      const double d = (1.0 + alpha) * (1.0 + alpha);
      const Mat3 ax = cross_matrix(a);
      return I + (1.0 - alpha) / d * ax + ax * ax / (2.0 * d);
    }
  }
  return I;
}

Quaternion small_angle_quat(const Vec3& da, int order) {
  if (order == 1) return {1.0, 0.5 * da};
  return {1.0 - da.squaredNorm() / 8.0, 0.5 * da};
}

Dcm perturbation_dcm(const Vec3& da, int order) {
  const Mat3 ax = cross_matrix(da);
  Mat3 c = Mat3::Identity() + ax;
  if (order >= 2) c += 0.5 * ax * ax;
  return c;
}

Vec3 kinematic_rate(const AttitudeVec3& v, const AngularVelocity& w) {
  const Vec3& a = v.a;
  switch (v.rep) {
    case Rep::EulerVector: {
      const double alpha = 0.5 * a.norm();
      double coeff;
      if (alpha < 1e-4) {
        // (1 - x cot x) / (4 x^2) = 1/12 + x^2/180 + O(x^4)
        coeff = 1.0 / 12.0 + alpha * alpha / 180.0;
      } else {
        const double s = std::sin(alpha);
        if (std::abs(s) < 1e-9) throw DomainError("Euler vector kinematics singular at 2k*pi");
        coeff = (1.0 - alpha * std::cos(alpha) / s) / (4.0 * alpha * alpha);
      }
      return w + 0.5 * a.cross(w) + coeff * a.cross(a.cross(w));
    }
    case Rep::Gibbs:
      return w + 0.5 * a.cross(w) + 0.25 * w.dot(a) * a;
    case Rep::MRP: {
      const double alpha = a.squaredNorm() / 16.0;
      // Third-term coefficient is 1/8 for a_p = 4 tan(phi/4) e.
      return (1.0 - alpha) * w + 0.5 * a.cross(w) + 0.125 * w.dot(a) * a;
    }
  }
  return w;
}

Vec4 quat_rate(const Quaternion& q, const AngularVelocity& w) {
  return (quat_mult(q, Quaternion(0.0, w)) * 0.5).coeffs();
}

Eigen::Matrix4d omega_matrix(const AngularVelocity& w) {
  Eigen::Matrix4d m;
  m << 0.0, -w.x(), -w.y(), -w.z(),
       w.x(), 0.0, w.z(), -w.y(),
       w.y(), -w.z(), 0.0, w.x(),
       w.z(), w.y(), -w.x(), 0.0;
  return m;
}

Vec4 quat_rate_matrix_form(const Quaternion& q, const AngularVelocity& w) {
  return 0.5 * omega_matrix(w) * q.coeffs();
}

Mat3 dcm_rate(const Dcm& c, const AngularVelocity& w) { return c * cross_matrix(w); }

Quaternion quat_delta_update(const Quaternion& q, const Vec3& da, int order) {
  if (order == 1) return (q + quat_mult(q, Quaternion(0.0, da)) * 0.5).normalized();
  return quat_mult(q, small_angle_quat(da, 2)).normalized();
}

Quaternion quat_taylor_increment(const Quaternion& q, const AngularVelocity& w, const Vec3& wdot,
                                 double dt, int order) {
  Quaternion inner(0.0, w * dt);
  if (order >= 2) inner = inner + Quaternion(-dt * dt * w.squaredNorm() / 4.0, wdot * dt * dt / 2.0);
  return quat_mult(q, inner) * 0.5;
}

Quaternion quat_integrate_step(const Quaternion& q, const AngularVelocity& w, const Vec3& wdot,
                               double dt) {
  return (q + quat_taylor_increment(q, w, wdot, dt, 2)).normalized();
}

double rotation_angle_between(const Quaternion& a, const Quaternion& b) {
  const Quaternion d = quat_mult(quat_conjugate(a.normalized()), b.normalized());
  return 2.0 * std::atan2(d.v.norm(), std::abs(d.w));
}

}  // namespace attest
