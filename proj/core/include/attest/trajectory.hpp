#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attest/sensor_sim.hpp"

namespace attest {

struct Trajectory {
  std::string name;
  double rate = 100.0;  // Hz
  std::vector<TruthSample> samples;

  // Strictly increasing time, |q| within 1e-3 of one, finite values.
  // Throws ValidationError.
  void validate() const;
  double duration() const;
};

inline constexpr double kQuatNormTolerance = 1e-3;

enum class MockupCase { LongHover, Easy, SlowRot, Mockup };

const char* to_string(MockupCase c);  // canonical test-case name, e.g. "mockup_easy"
std::optional<MockupCase> mockup_case_from_name(std::string_view name);

// omega_i(t) = A_i sin(2 pi f_i t + phase_i) + bias_i during the maneuver,
// zero afterwards. Translation acceleration is always zero.
struct MockupSpec {
  MockupCase kind = MockupCase::LongHover;
  Vec3 amplitude = Vec3::Zero();  // rad/s
  Vec3 frequency = Vec3::Zero();  // Hz
  Vec3 phase = Vec3::Zero();      // rad
  Vec3 constant = Vec3::Zero();   // rad/s
  Quaternion q0;
  double maneuver_s = 60.0;
  double duration_s = 120.0;

  static MockupSpec canonical(MockupCase kind);

  AngularVelocity omega(double t) const;
};

// Fixed-step RK4 on q_dot = 1/2 q (x) [0, w], renormalized each step. A step
// belongs to the maneuver when its midpoint does, so the hover half holds q
// exactly constant.
Trajectory gen_mockup(const MockupSpec& spec, double rate);

// CSV with header t,qw,qx,qy,qz,wx,wy,wz,ax,ay,az; '#' starts a comment line.
// Throws ParseError (1-based line/column) and ValidationError.
Trajectory parse_trajectory(std::istream& in, const std::string& name = "trajectory");
Trajectory load_trajectory(const std::string& path);
void write_trajectory(std::ostream& out, const Trajectory& traj);
void save_trajectory(const Trajectory& traj, const std::string& path);

// Uniform grid t0 + k/rate up to the last sample. Slerp for q, linear for w
// and rddot (and r, v when every sample has them).
Trajectory resample(const Trajectory& traj, double rate);

Quaternion slerp(const Quaternion& a, const Quaternion& b, double s);

}  // namespace attest
