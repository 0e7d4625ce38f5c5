#include "attest/trajectory.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace attest {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr const char* kHeader = "t,qw,qx,qy,qz,wx,wy,wz,ax,ay,az";
constexpr int kColumns = 11;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void Trajectory::validate() const {
  if (!(rate > 0.0)) throw ValidationError("trajectory rate must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const TruthSample& s = samples[i];
    if (!std::isfinite(s.t) || !s.q.coeffs().allFinite() || !s.w.allFinite() || !s.rddot.allFinite()) {
      throw ValidationError("sample " + std::to_string(i) + " has non-finite values");
    }
    if (std::abs(s.q.norm() - 1.0) > kQuatNormTolerance) {
      std::ostringstream os;
      os << "sample " << i << " (t=" << s.t << ") has quaternion norm " << s.q.norm();
      throw ValidationError(os.str());
    }
    if (i > 0 && !(s.t > samples[i - 1].t)) {
      std::ostringstream os;
      os << "time is not strictly increasing at sample " << i << " (t=" << s.t << ")";
      throw ValidationError(os.str());
    }
  }
}

double Trajectory::duration() const {
  return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
}

const char* to_string(MockupCase c) {
  switch (c) {
    case MockupCase::LongHover:
      return "mockup_long_hover";
    case MockupCase::Easy:
      return "mockup_easy";
    case MockupCase::SlowRot:
      return "mockup_slowrot";
    case MockupCase::Mockup:
      return "mockup";
  }
  return "?";
}

std::optional<MockupCase> mockup_case_from_name(std::string_view name) {
  for (MockupCase c : {MockupCase::LongHover, MockupCase::Easy, MockupCase::SlowRot, MockupCase::Mockup}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

MockupSpec MockupSpec::canonical(MockupCase kind) {
  MockupSpec s;
  s.kind = kind;
  switch (kind) {
    case MockupCase::LongHover:
      break;
    case MockupCase::Easy:
      s.amplitude = Vec3(4.0, 3.0, 5.0) * kDegToRad;
      s.frequency = Vec3(0.11, 0.17, 0.23);
      break;
    case MockupCase::SlowRot:
      s.constant = Vec3(6.0 * kDegToRad, 0.0, 0.0);
      break;
    case MockupCase::Mockup:
      s.amplitude = Vec3(300.0, 200.0, 150.0) * kDegToRad;
      s.frequency = Vec3(0.20, 0.31, 0.47);
      break;
  }
  return s;
}

namespace {

// Maneuver waveform without the cut-off at maneuver_s.
AngularVelocity profile(const MockupSpec& spec, double t) {
  Vec3 w = spec.constant;
  for (int i = 0; i < 3; ++i)
    w(i) += spec.amplitude(i) * std::sin(kTwoPi * spec.frequency(i) * t + spec.phase(i));
  return w;
}

}  // namespace

AngularVelocity MockupSpec::omega(double t) const {
  if (t >= maneuver_s) return Vec3::Zero();
  return profile(*this, t);
}

Trajectory gen_mockup(const MockupSpec& spec, double rate) {
  if (!(rate > 0.0)) throw ConfigError("mockup rate must be positive");
  const double dt = 1.0 / rate;
  const auto steps = static_cast<std::size_t>(std::llround(spec.duration_s * rate));

  Trajectory traj;
  traj.name = to_string(spec.kind);
  traj.rate = rate;
  traj.samples.reserve(steps + 1);

  const auto rate_fn = [&](const Vec4& q, double t) {
    return quat_rate(Quaternion::from_vec4(q), profile(spec, t));
  };

  Vec4 q = spec.q0.normalized().coeffs();
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    TruthSample s;
    s.t = t;
    s.q = Quaternion::from_vec4(q);
    s.w = spec.omega(t);
    traj.samples.push_back(s);
    if (k == steps) break;

    if (t + 0.5 * dt < spec.maneuver_s) {
      const Vec4 k1 = rate_fn(q, t);
      const Vec4 k2 = rate_fn(q + 0.5 * dt * k1, t + 0.5 * dt);
      const Vec4 k3 = rate_fn(q + 0.5 * dt * k2, t + 0.5 * dt);
      const Vec4 k4 = rate_fn(q + dt * k3, t + dt);
      q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      q.normalize();
    }
  }
  return traj;
}

Trajectory parse_trajectory(std::istream& in, const std::string& name) {
  Trajectory traj;
  traj.name = name;
  std::string raw;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != kHeader) throw ParseError(std::string("expected header '") + kHeader + "'", line_no, 1);
      have_header = true;
      continue;
    }

    std::array<double, kColumns> v{};
    std::size_t pos = 0;
    for (int c = 0; c < kColumns; ++c) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      const std::string_view field = trim(line.substr(pos, end - pos));
      const int column = static_cast<int>(raw.find_first_not_of(" \t") + pos + 1);
      if (field.empty()) throw ParseError("missing value for column " + std::to_string(c + 1), line_no, column);
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v[c]);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("invalid number '" + std::string(field) + "'", line_no, column);
      if (c + 1 < kColumns && end == line.size())
        throw ParseError("expected " + std::to_string(kColumns) + " columns", line_no, static_cast<int>(raw.size()) + 1);
      pos = end + 1;
    }
    if (pos <= line.size()) throw ParseError("too many columns", line_no, static_cast<int>(pos));

    TruthSample s;
    s.t = v[0];
    s.q = Quaternion(v[1], v[2], v[3], v[4]);
    s.w = Vec3(v[5], v[6], v[7]);
    s.rddot = Vec3(v[8], v[9], v[10]);
    traj.samples.push_back(s);
  }
  if (!have_header) throw ParseError("missing header", line_no + 1, 1);
  if (traj.samples.size() >= 2) traj.rate = static_cast<double>(traj.samples.size() - 1) / traj.duration();
  traj.validate();
  return traj;
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file " + path);
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return parse_trajectory(in, name);
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << kHeader << '\n';
  char buf[32];
  for (const TruthSample& s : traj.samples) {
    const std::array<double, kColumns> v{s.t,      s.q.w,    s.q.v.x(),     s.q.v.y(),     s.q.v.z(),    s.w.x(),
                                         s.w.y(),  s.w.z(),  s.rddot.x(),   s.rddot.y(),   s.rddot.z()};
    for (int c = 0; c < kColumns; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", v[c]);
      out << buf << (c + 1 < kColumns ? ',' : '\n');
    }
  }
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trajectory file " + path);
  out << "# " << traj.name << ", " << traj.rate << " Hz\n";
  write_trajectory(out, traj);
  if (!out) throw IoError("failed writing trajectory file " + path);
}

Quaternion slerp(const Quaternion& a, const Quaternion& b, double s) {
  Vec4 qa = a.coeffs();
  Vec4 qb = b.coeffs();
  double c = qa.dot(qb);
  if (c < 0.0) {
    qb = -qb;
    c = -c;
  }
  if (c > 1.0 - 1e-12) return Quaternion::from_vec4((1.0 - s) * qa + s * qb).normalized();
  const double theta = std::acos(std::min(c, 1.0));
  const double sn = std::sin(theta);
  return Quaternion::from_vec4((std::sin((1.0 - s) * theta) * qa + std::sin(s * theta) * qb) / sn).normalized();
}

Trajectory resample(const Trajectory& traj, double rate) {
  if (!(rate > 0.0)) throw ConfigError("resample rate must be positive");
  if (traj.samples.empty()) throw ValidationError("cannot resample an empty trajectory");
  const auto& src = traj.samples;
  const double t0 = src.front().t;
  const double t_end = src.back().t;
  const auto n = static_cast<std::size_t>(std::floor((t_end - t0) * rate + 1e-6));
  const bool with_rv = std::all_of(src.begin(), src.end(), [](const TruthSample& s) { return s.r && s.v; });

  Trajectory out;
  out.name = traj.name;
  out.rate = rate;
  out.samples.reserve(n + 1);
  std::size_t j = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k) / rate;
    while (j + 1 < src.size() && src[j + 1].t <= t + 1e-9) ++j;
    TruthSample s;
    if (std::abs(src[j].t - t) <= 1e-9 || j + 1 == src.size()) {
      s = src[j];
    } else {
      const TruthSample& a = src[j];
      const TruthSample& b = src[j + 1];
      const double u = (t - a.t) / (b.t - a.t);
      s.q = slerp(a.q, b.q, u);
      s.w = (1.0 - u) * a.w + u * b.w;
      s.rddot = (1.0 - u) * a.rddot + u * b.rddot;
      if (with_rv) {
        s.r = Vec3((1.0 - u) * *a.r + u * *b.r);
        s.v = Vec3((1.0 - u) * *a.v + u * *b.v);
      }
    }
    s.t = t;
    out.samples.push_back(s);
  }
  return out;
}

}  // namespace attest
