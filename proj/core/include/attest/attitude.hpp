#pragma once

// Attitude algebra shared by every estimator.
//
// Conventions:
//   * Quaternions are scalar-first, q = [q0, qv].
//   * A quaternion q = N_q_B transforms body-frame vectors into the inertial
//     frame: v_N = C(q) v_B. Composition follows N_q_B = N_q_A (x) A_q_B.
//   * C(q) is the matrix that maps final-frame (body) coordinates into the
//     initial-frame (inertial) coordinates.

#include <Eigen/Dense>

#include "attest/errors.hpp"

namespace attest {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Direction cosine matrix, final frame -> initial frame.
using Dcm = Mat3;
// Body-frame angular velocity, rad/s.
using AngularVelocity = Vec3;

struct Quaternion {
  double w = 1.0;
  Vec3 v = Vec3::Zero();

  Quaternion() = default;
  Quaternion(double w_, const Vec3& v_) : w(w_), v(v_) {}
  Quaternion(double w_, double x, double y, double z) : w(w_), v(x, y, z) {}

  static Quaternion identity() { return {}; }
  static Quaternion from_vec4(const Vec4& c) { return {c(0), c.tail<3>()}; }

  Vec4 coeffs() const { return {w, v.x(), v.y(), v.z()}; }
  double norm() const { return std::sqrt(w * w + v.squaredNorm()); }
  Quaternion normalized() const;

  Quaternion operator+(const Quaternion& o) const { return {w + o.w, v + o.v}; }
  Quaternion operator-(const Quaternion& o) const { return {w - o.w, v - o.v}; }
  Quaternion operator*(double s) const { return {w * s, v * s}; }
  Quaternion operator-() const { return {-w, -v}; }
};

enum class Rep { EulerVector, Gibbs, MRP };

const char* to_string(Rep rep);

// Three-parameter attitude. For EulerVector `a` is phi*e (radians); Gibbs is
// 2 tan(phi/2) e; MRP is 4 tan(phi/4) e.
struct AttitudeVec3 {
  Rep rep = Rep::EulerVector;
  Vec3 a = Vec3::Zero();

  AttitudeVec3() = default;
  // Euler vectors are wrapped to the principal rotation (|a| <= pi); a Gibbs
  // vector whose angle is within 1e-6 rad of pi is rejected with DomainError.
  AttitudeVec3(Rep rep_, const Vec3& a_);

  // Rotation angle phi in [0, pi] (Gibbs) / [0, 2pi) (others).
  double angle() const;
};

// Gibbs vectors closer than this to a half-turn are rejected.
inline constexpr double kGibbsSingularityMargin = 1e-6;

Mat3 cross_matrix(const Vec3& v);

Quaternion quat_mult(const Quaternion& q, const Quaternion& p);
inline Quaternion operator*(const Quaternion& q, const Quaternion& p) { return quat_mult(q, p); }
Quaternion quat_conjugate(const Quaternion& q);

// v_N = C(q) v_B via the sandwich product q (x) [0, v] (x) q*.
Vec3 quat_transform(const Quaternion& q, const Vec3& v_body);
Dcm quat_to_dcm(const Quaternion& q);

Quaternion vec3_to_quat(const AttitudeVec3& v);
// Returns the principal (shortest) rotation; sign of q is irrelevant.
AttitudeVec3 quat_to_vec3(Rep rep, const Quaternion& q);
Dcm vec3_to_dcm(const AttitudeVec3& v);

// order 1: [1, da/2]; order 2: [1 - |da|^2/8, da/2]. Not normalized.
Quaternion small_angle_quat(const Vec3& da, int order);
// order 1: I + [da x]; order 2 adds 1/2 [da x]^2.
Dcm perturbation_dcm(const Vec3& da, int order);

// Exact time derivative of the three-parameter attitude for body rate w.
Vec3 kinematic_rate(const AttitudeVec3& v, const AngularVelocity& w);
// 1/2 q (x) [0, w].
Vec4 quat_rate(const Quaternion& q, const AngularVelocity& w);
// 1/2 Omega(w) q, the matrix form of quat_rate.
Vec4 quat_rate_matrix_form(const Quaternion& q, const AngularVelocity& w);
Eigen::Matrix4d omega_matrix(const AngularVelocity& w);
Mat3 dcm_rate(const Dcm& c, const AngularVelocity& w);

// Applies the small rotation da to q and renormalizes.
// order 1: q + 1/2 q (x) [0, da]; order 2: q (x) small_angle_quat(da, 2).
Quaternion quat_delta_update(const Quaternion& q, const Vec3& da, int order);

// Raw Taylor increment Delta q (not unit) for one step of q_dot = 1/2 q (x) [0, w].
// order 1 keeps only the w*dt term; order 2 adds -dt^2|w|^2/4 and wdot*dt^2/2.
Quaternion quat_taylor_increment(const Quaternion& q, const AngularVelocity& w, const Vec3& wdot,
                                 double dt, int order = 2);
// q + Delta q (second order), renormalized.
Quaternion quat_integrate_step(const Quaternion& q, const AngularVelocity& w, const Vec3& wdot,
                               double dt);

// Rotation angle between two attitudes, sign-agnostic, in [0, pi].
double rotation_angle_between(const Quaternion& a, const Quaternion& b);

}  // namespace attest
