#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "attest/trajectory.hpp"
#include "test_util.hpp"

using namespace attest;
using attest::testing::quat_distance;

namespace fs = std::filesystem;

namespace {

constexpr const char* kHeader = "t,qw,qx,qy,qz,wx,wy,wz,ax,ay,az\n";

Trajectory parse(const std::string& text) {
  std::istringstream in(text);
  return parse_trajectory(in, "test");
}

Quaternion rot(const Vec3& a) { return vec3_to_quat(AttitudeVec3(Rep::EulerVector, a)); }

}  // namespace

TEST(GenMockup, LongHoverIsStatic) {
  const Trajectory t = gen_mockup(MockupSpec::canonical(MockupCase::LongHover), 100.0);
  ASSERT_EQ(t.samples.size(), 12001u);
  EXPECT_EQ(t.name, "mockup_long_hover");
  EXPECT_DOUBLE_EQ(t.duration(), 120.0);
  for (const TruthSample& s : t.samples) {
    ASSERT_EQ(s.q.coeffs(), Quaternion::identity().coeffs());
    ASSERT_EQ(s.w, Vec3::Zero());
    ASSERT_EQ(s.rddot, Vec3::Zero());
  }
}

TEST(GenMockup, SlowRotClosesAfterOneTurn) {
  const Trajectory t = gen_mockup(MockupSpec::canonical(MockupCase::SlowRot), 100.0);
  EXPECT_NEAR(t.samples[3000].w.x(), 6.0 * kDegToRad, 1e-15);
  EXPECT_EQ(t.samples[3000].w.y(), 0.0);
  EXPECT_LT(rotation_angle_between(t.samples[3000].q, rot({kDegToRad * 180.0, 0, 0})), 1e-9);
  EXPECT_LT(rotation_angle_between(t.samples[6000].q, t.samples[0].q), 1e-9);
  for (std::size_t k = 6000; k < t.samples.size(); ++k) {
    ASSERT_EQ(t.samples[k].q.coeffs(), t.samples[6000].q.coeffs());
    ASSERT_EQ(t.samples[k].w, Vec3::Zero());
  }
}

TEST(GenMockup, PeakRates) {
  const Trajectory m = gen_mockup(MockupSpec::canonical(MockupCase::Mockup), 1000.0);
  double peak = 0;
  for (const TruthSample& s : m.samples) peak = std::max(peak, s.w.cwiseAbs().maxCoeff());
  EXPECT_NEAR(peak * kRadToDeg, 300.0, 1e-3);

  const Trajectory e = gen_mockup(MockupSpec::canonical(MockupCase::Easy), 100.0);
  peak = 0;
  for (const TruthSample& s : e.samples) peak = std::max(peak, s.w.cwiseAbs().maxCoeff());
  EXPECT_LE(peak * kRadToDeg, 5.0);
}

TEST(GenMockup, KinematicallyConsistent) {
  for (MockupCase c : {MockupCase::Easy, MockupCase::SlowRot, MockupCase::Mockup}) {
    const Trajectory t = gen_mockup(MockupSpec::canonical(c), 1000.0);
    for (std::size_t k = 1; k + 1 < 60000; k += 97) {
      const TruthSample& s = t.samples[k];
      const double dt = t.samples[k + 1].t - t.samples[k - 1].t;
      const Vec4 fd = (t.samples[k + 1].q.coeffs() - t.samples[k - 1].q.coeffs()) / dt;
      const Vec4 rate = quat_rate(s.q, s.w);
      ASSERT_LT((fd - rate).norm(), 1e-4 * s.w.norm() + 1e-12)
          << to_string(c) << " k=" << k;
    }
    for (const TruthSample& s : t.samples) ASSERT_EQ(s.rddot, Vec3::Zero());
  }
}

TEST(GenMockup, ConvergesWithRate) {
  const MockupSpec spec = MockupSpec::canonical(MockupCase::Mockup);
  const Trajectory coarse = gen_mockup(spec, 100.0);
  const Trajectory fine = gen_mockup(spec, 1000.0);
  EXPECT_LT(rotation_angle_between(coarse.samples[6000].q, fine.samples[60000].q), 1e-5);
}

TEST(MockupCase, Names) {
  for (MockupCase c : {MockupCase::LongHover, MockupCase::Easy, MockupCase::SlowRot, MockupCase::Mockup}) {
    EXPECT_EQ(mockup_case_from_name(to_string(c)), c);
  }
  EXPECT_FALSE(mockup_case_from_name("straightup").has_value());
}

TEST(ParseTrajectory, MinimalRoundTrip) {
  Trajectory t;
  t.name = "tiny";
  TruthSample a, b;
  a.t = 0.0;
  a.q = Quaternion(1, 0, 0, 0);
  b.t = 0.1;
  b.q = rot({0.1, 0.2, -0.3});
  b.w = Vec3(0.1 / 3.0, -2.0 / 7.0, 1e-17);
  b.rddot = Vec3(1.0 / 3.0, 0, -9.81);
  t.samples = {a, b};
  t.rate = 10.0;

  const fs::path dir = fs::temp_directory_path() / "attest_traj_test";
  fs::create_directories(dir);
  const fs::path file = dir / "tiny.csv";
  save_trajectory(t, file.string());
  const Trajectory back = load_trajectory(file.string());
  EXPECT_EQ(back.name, "tiny");
  ASSERT_EQ(back.samples.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.samples[i].t, t.samples[i].t);
    EXPECT_EQ(back.samples[i].q.coeffs(), t.samples[i].q.coeffs());
    EXPECT_EQ(back.samples[i].w, t.samples[i].w);
    EXPECT_EQ(back.samples[i].rddot, t.samples[i].rddot);
  }
  EXPECT_DOUBLE_EQ(back.rate, 10.0);
  fs::remove_all(dir);
}

TEST(ParseTrajectory, CommentsAndWhitespace) {
  const Trajectory t = parse(std::string("# recorded\n") + kHeader +
                             "0,1,0,0,0,0,0,0,0,0,0\n# mid comment\n0.5, 1, 0, 0, 0, 0.1, 0, 0, 0, 0, 0\n");
  ASSERT_EQ(t.samples.size(), 2u);
  EXPECT_EQ(t.samples[1].w.x(), 0.1);
  EXPECT_DOUBLE_EQ(t.rate, 2.0);
}

TEST(ParseTrajectory, RejectsNonUnitQuaternion) {
  EXPECT_THROW(parse(std::string(kHeader) + "0,0.9,0,0,0,0,0,0,0,0,0\n0.1,1,0,0,0,0,0,0,0,0,0\n"), ValidationError);
  // Within the 1e-3 tolerance is accepted.
  EXPECT_NO_THROW(parse(std::string(kHeader) + "0,1.0005,0,0,0,0,0,0,0,0,0\n0.1,1,0,0,0,0,0,0,0,0,0\n"));
}

TEST(ParseTrajectory, RejectsDecreasingTime) {
  EXPECT_THROW(parse(std::string(kHeader) + "0.2,1,0,0,0,0,0,0,0,0,0\n0.1,1,0,0,0,0,0,0,0,0,0\n"), ValidationError);
  EXPECT_THROW(parse(std::string(kHeader) + "0.1,1,0,0,0,0,0,0,0,0,0\n0.1,1,0,0,0,0,0,0,0,0,0\n"), ValidationError);
}

TEST(ParseTrajectory, ParseErrorsCarryPosition) {
  try {
    parse(std::string(kHeader) + "0,1,0,0,0,0,0,0,0,0,0\n0.1,1,0,zero,0,0,0,0,0,0,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 9);
  }
  try {
    parse(std::string(kHeader) + "0,1,0,0,0,0,0,0,0,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse("t,qw,qx\n0,1,0\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
}

TEST(LoadTrajectory, MissingFile) { EXPECT_THROW(load_trajectory("/nonexistent/flight.csv"), IoError); }

TEST(Resample, NativeRateIsIdentity) {
  const Trajectory t = gen_mockup(MockupSpec::canonical(MockupCase::Easy), 50.0);
  const Trajectory r = resample(t, 50.0);
  ASSERT_EQ(r.samples.size(), t.samples.size());
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    ASSERT_NEAR(r.samples[k].t, t.samples[k].t, 1e-12);
    ASSERT_LT((r.samples[k].q.coeffs() - t.samples[k].q.coeffs()).norm(), 1e-12);
    ASSERT_LT((r.samples[k].w - t.samples[k].w).norm(), 1e-12);
  }
}

TEST(Resample, ConstantRateUpsampling) {
  const Vec3 w(0.3, -0.2, 0.5);
  Trajectory t;
  t.name = "spin";
  for (int k = 0; k <= 20; ++k) {
    TruthSample s;
    s.t = 0.1 * k;
    s.q = rot(w * s.t);
    s.w = w;
    t.samples.push_back(s);
  }
  const Trajectory r = resample(t, 100.0);
  ASSERT_EQ(r.samples.size(), 201u);
  EXPECT_NEAR(r.samples.back().t, 2.0, 1e-12);
  for (const TruthSample& s : r.samples) {
    ASSERT_LT(quat_distance(s.q, rot(w * s.t)), 1e-6);
    ASSERT_LT((s.w - w).norm(), 1e-15);
  }
}

TEST(Resample, HoverStaysConstant) {
  const Trajectory t = gen_mockup(MockupSpec::canonical(MockupCase::LongHover), 10.0);
  const Trajectory r = resample(t, 37.0);
  EXPECT_EQ(r.samples.front().t, 0.0);
  for (const TruthSample& s : r.samples) {
    ASSERT_LT(quat_distance(s.q, Quaternion::identity()), 1e-15);
    ASSERT_EQ(s.w, Vec3::Zero());
  }
}

TEST(Slerp, Endpoints) {
  const Quaternion a = rot({0.1, 0, 0}), b = rot({0, 0.5, 0});
  EXPECT_LT(quat_distance(slerp(a, b, 0.0), a), 1e-15);
  EXPECT_LT(quat_distance(slerp(a, b, 1.0), b), 1e-15);
  EXPECT_NEAR(rotation_angle_between(slerp(a, b, 0.5), a), 0.5 * rotation_angle_between(a, b), 1e-12);
  // Takes the short arc even when b is given with the opposite sign.
  EXPECT_LT(quat_distance(slerp(a, -b, 0.5), slerp(a, b, 0.5)), 1e-15);
}
