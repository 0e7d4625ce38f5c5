#include "attest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

namespace attest {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- scenarios

std::vector<ScenarioConfig> ScenarioConfig::canonical() {
  using K = MagFieldKnowledge;
  using U = MagUsage;
  return {
      {"nominal", K::DeclinationOnly, U::Horizontal, false},
      {"no_mag", K::DeclinationOnly, U::None, false},
      {"3D_mag", K::Xyz, U::Xyz, false},
      {"dynamic_gains", K::DeclinationOnly, U::Horizontal, true},
  };
}

std::optional<ScenarioConfig> ScenarioConfig::canonical(const std::string& name) {
  for (const ScenarioConfig& s : canonical()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("scenario name is empty");
  if (mag_meas_usage == MagUsage::Xyz && mag_field_knowledge != MagFieldKnowledge::Xyz)
    throw ConfigError("scenario " + name + ": mag_meas_usage = xyz needs mag_field_knowledge = xyz");
}

const std::vector<std::string>& canonical_testcases() {
  static const std::vector<std::string> names{"mockup_long_hover", "mockup_easy",    "mockup_slowrot",
                                              "mockup",            "straightup",     "bumpy_hover",
                                              "straightflight",    "longturn_bothways", "longturn"};
  return names;
}

// ---------------------------------------------------------------- run config

std::string RunConfig::label() const {
  return scenario.name + "/" + testcase + "/" + to_string(estimator);
}

void RunConfig::validate() const {
  scenario.validate();
  if (!(rate > 0.0)) throw ConfigError("rate must be positive");
  SensorConfig s = sensors;
  s.sample_rate = rate;
  s.validate();
  if (!(detector.t_low >= 0.0) || !(detector.t_high >= detector.t_low) || !(detector.window_s > 0.0))
    throw ConfigError("detector thresholds need 0 <= t_low <= t_high and a positive window");
  params.validate();
  if (scenario.dynamic_gains) {
    const bool missing = estimator == EstimatorKind::Cf    ? !params.cf.low_dynamics
                         : estimator == EstimatorKind::Ekf ? !params.ekf.low_dynamics
                                                           : !params.ukf.low_dynamics;
    if (missing) throw ConfigError("dynamic_gains scenario needs low-dynamics parameters");
  }
  if (!mockup_case_from_name(testcase) && trajectory_path.empty())
    throw ConfigError("test case " + testcase + " has no trajectory file configured");
}

// ---------------------------------------------------------------- running

Trajectory resolve_trajectory(const RunConfig& cfg) {
  if (const auto mock = mockup_case_from_name(cfg.testcase)) return gen_mockup(MockupSpec::canonical(*mock), cfg.rate);
  Trajectory traj = load_trajectory(cfg.trajectory_path);
  traj.name = cfg.testcase;
  if (traj.samples.size() < 2) throw ValidationError("flight trajectory needs at least two samples");
  return resample(traj, cfg.rate);
}

bool RunResult::same_outputs(const RunResult& o) const {
  if (scenario != o.scenario || testcase != o.testcase || estimator != o.estimator) return false;
  if (!(metrics == o.metrics) || !(counters == o.counters)) return false;
  if (errors.size() != o.errors.size() || ticks.size() != o.ticks.size()) return false;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const ErrorSample& a = errors[i];
    const ErrorSample& b = o.errors[i];
    if (a.t != b.t || a.dav != b.dav || a.euler_err != b.euler_err || a.bias_err != b.bias_err) return false;
  }
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const TickRecord& a = ticks[i];
    const TickRecord& b = o.ticks[i];
    if (a.t != b.t || a.accel != b.accel || a.gyro != b.gyro || a.q_true.coeffs() != b.q_true.coeffs() ||
        a.q_est.coeffs() != b.q_est.coeffs() || a.b_true != b.b_true || a.b_est != b.b_est || a.mu_f != b.mu_f ||
        a.low_dynamics != b.low_dynamics)
      return false;
  }
  return true;
}

namespace {

MagReference mag_reference(const RunConfig& cfg) {
  const Vec3& f = cfg.sensors.mag_field;
  if (cfg.scenario.mag_field_knowledge == MagFieldKnowledge::Xyz) return MagReference::from_field(f);
  return MagReference::from_declination(std::atan2(f.y(), f.x()));
}

RunResult run_case_impl(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const Trajectory traj = resolve_trajectory(cfg);
  if (traj.samples.empty()) throw ValidationError("empty trajectory");

  SensorConfig sensors = cfg.sensors;
  sensors.seed = cfg.seed;
  sensors.sample_rate = cfg.rate;
  SensorSimulator sim(sensors);

  const Quaternion q0 = quat_mult(traj.samples.front().q.normalized(),
                                  vec3_to_quat(AttitudeVec3(Rep::EulerVector, cfg.init_error)));
  auto est = make_estimator(cfg.estimator, cfg.params, cfg.scenario.dynamic_gains, q0);
  DetectorState detector(cfg.detector, cfg.rate);

  TickInput in;
  in.gravity = sensors.gravity;
  in.mag_usage = cfg.scenario.mag_meas_usage;
  in.mag_ref = mag_reference(cfg);

  RunResult r;
  r.scenario = cfg.scenario.name;
  r.testcase = cfg.testcase;
  r.estimator = cfg.estimator;
  r.errors.reserve(traj.samples.size());
  r.ticks.reserve(traj.samples.size());

  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const TruthSample& truth = traj.samples[k];
    const SensorSample s = sim.sample(truth);
    detector.update(s.accel, cfg.detector);
    const bool low = detector.low_dynamics();
    if (k > 0) {
      est->propagate(s.gyro, truth.t - traj.samples[k - 1].t);
      in.accel = s.accel;
      in.mag = s.mag;
      est->correct(in, low);
    }

    TickRecord rec;
    rec.t = truth.t;
    rec.accel = s.accel;
    rec.gyro = s.gyro;
    rec.q_true = truth.q;
    rec.q_est = est->attitude();
    rec.b_true = s.true_bias;
    rec.b_est = est->bias();
    rec.mu_f = detector.mu_f();
    rec.low_dynamics = low;
    r.ticks.push_back(rec);
    r.errors.push_back(make_error_sample(truth.t, rec.q_est, truth.q, rec.b_est, rec.b_true));
  }

  r.metrics = compute_metrics(r.errors);
  r.counters = est->counters();
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

RunResult run_case(const RunConfig& cfg) {
  try {
    return run_case_impl(cfg);
  } catch (const RunError&) {
    throw;
  } catch (const std::exception& e) {
    throw RunError(cfg.label(), e.what());
  }
}

bool MatrixReport::all_ok() const { return failures() == 0; }

std::size_t MatrixReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return !c.result; }));
}

namespace {

std::size_t rank_of(const std::vector<std::string>& order, const std::string& name) {
  const auto it = std::find(order.begin(), order.end(), name);
  return static_cast<std::size_t>(it - order.begin());
}

bool cell_before(const RunConfig& a, const RunConfig& b) {
  std::vector<std::string> scen;
  for (const auto& s : ScenarioConfig::canonical()) scen.push_back(s.name);
  const auto key = [&](const RunConfig& c) {
    return std::make_tuple(rank_of(scen, c.scenario.name), c.scenario.name, rank_of(canonical_testcases(), c.testcase),
                           c.testcase, static_cast<int>(c.estimator), c.seed);
  };
  return key(a) < key(b);
}

}  // namespace

MatrixReport run_matrix(const std::vector<RunConfig>& configs, unsigned jobs) {
  MatrixReport report;
  report.cells.resize(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) report.cells[i].config = configs[i];

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(configs.size(), 1)));

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < report.cells.size(); i = next++) {
      CellResult& cell = report.cells[i];
      try {
        cell.result = run_case(cell.config);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }

  std::stable_sort(report.cells.begin(), report.cells.end(),
                   [](const CellResult& a, const CellResult& b) { return cell_before(a.config, b.config); });
  return report;
}

// ---------------------------------------------------------------- outputs

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_timeseries(const fs::path& path, const RunResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "t,accel_x,accel_y,accel_z,gyro_x,gyro_y,gyro_z,"
         "qw_true,qx_true,qy_true,qz_true,qw_est,qx_est,qy_est,qz_est,"
         "dav_x,dav_y,dav_z,err_heading,err_pitch,err_roll,"
         "bias_err_x,bias_err_y,bias_err_z,mu_f,low_dynamics\n";
  for (std::size_t i = 0; i < r.ticks.size(); ++i) {
    const TickRecord& k = r.ticks[i];
    const ErrorSample& e = r.errors[i];
    std::string row = fmt(k.t);
    const auto add = [&](double v) {
      row += ',';
      row += fmt(v);
    };
    for (int j = 0; j < 3; ++j) add(k.accel(j));
    for (int j = 0; j < 3; ++j) add(k.gyro(j));
    for (int j = 0; j < 4; ++j) add(k.q_true.coeffs()(j));
    for (int j = 0; j < 4; ++j) add(k.q_est.coeffs()(j));
    for (int j = 0; j < 3; ++j) add(e.dav(j));
    for (int j = 0; j < 3; ++j) add(e.euler_err(j));
    for (int j = 0; j < 3; ++j) add(e.bias_err(j));
    add(k.mu_f);
    row += k.low_dynamics ? ",1\n" : ",0\n";
    out << row;
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string summary_csv(const MatrixReport& report) {
  std::string s = std::string(kSummaryHeader) + "\n";
  for (const CellResult& c : report.cells) {
    if (!c.result) continue;
    const MetricsReport& m = c.result->metrics;
    s += c.config.scenario.name + "," + c.config.testcase + "," + to_string(c.config.estimator) + "," +
         fmt(m.max_ev_z) + "," + fmt(m.max_ev_xy) + "," + fmt(m.fin_h) + "," + fmt(m.fin_pr) + "\n";
  }
  return s;
}

void emit_outputs(const MatrixReport& report, const std::string& outdir, const OutputOptions& opts) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create output directory " + outdir + ": " + ec.message());

  write_file(fs::path(outdir) / "summary.csv", summary_csv(report));

  const fs::path errors_path = fs::path(outdir) / "errors.csv";
  if (!report.all_ok()) {
    std::string e = "scenario,testcase,estimator,error\n";
    for (const CellResult& c : report.cells) {
      if (c.result) continue;
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      e += c.config.scenario.name + "," + c.config.testcase + "," + to_string(c.config.estimator) + ",\"" + msg +
           "\"\n";
    }
    write_file(errors_path, e);
  } else {
    fs::remove(errors_path, ec);
  }

  if (opts.timeseries) {
    for (const CellResult& c : report.cells) {
      if (!c.result) continue;
      const fs::path dir = fs::path(outdir) / "runs" / c.config.scenario.name / c.config.testcase /
                           to_string(c.config.estimator);
      fs::create_directories(dir, ec);
      if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
      write_timeseries(dir / "timeseries.csv", *c.result);
    }
  }

  if (opts.manifest) {
    std::vector<RunConfig> configs;
    for (const CellResult& c : report.cells) configs.push_back(c.config);
    write_file(fs::path(outdir) / "manifest.json", manifest_json(configs));
  }
}

// ---------------------------------------------------------------- manifest

namespace {

template <class M>
json mat_to_json(const M& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

template <class M>
M mat_from_json(const json& a) {
  M m;
  if (!a.is_array() || a.size() != static_cast<std::size_t>(m.size())) throw ConfigError("matrix has wrong size");
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = a.at(k++).get<double>();
  return m;
}

json weights_json(const CfGains& g) {
  return {{"accel", {{"w_a", mat_to_json(g.accel.w_a)}, {"w_b", mat_to_json(g.accel.w_b)}}},
          {"mag", {{"w_a", mat_to_json(g.mag.w_a)}, {"w_b", mat_to_json(g.mag.w_b)}}}};
}

CfGains weights_from(const json& j) {
  CfGains g;
  g.accel = {mat_from_json<Vec3>(j.at("accel").at("w_a")), mat_from_json<Vec3>(j.at("accel").at("w_b"))};
  g.mag = {mat_from_json<Vec3>(j.at("mag").at("w_a")), mat_from_json<Vec3>(j.at("mag").at("w_b"))};
  return g;
}

json kalman_json(const KalmanGains& g) {
  return {{"r_accel", mat_to_json(g.r_accel)}, {"r_mag", mat_to_json(g.r_mag)}};
}

KalmanGains kalman_from(const json& j) {
  return {mat_from_json<Mat3>(j.at("r_accel")), mat_from_json<Mat3>(j.at("r_mag"))};
}

template <class P, class F>
json schedule_json(const GainSchedule<P>& s, F&& to) {
  return {{"nominal", to(s.nominal)}, {"low_dynamics", s.low_dynamics ? to(*s.low_dynamics) : json(nullptr)}};
}

template <class P, class F>
GainSchedule<P> schedule_from(const json& j, F&& from) {
  GainSchedule<P> s;
  s.nominal = from(j.at("nominal"));
  if (!j.at("low_dynamics").is_null()) s.low_dynamics = from(j.at("low_dynamics"));
  return s;
}

MagFieldKnowledge knowledge_from(const std::string& s) {
  if (s == "declination_only") return MagFieldKnowledge::DeclinationOnly;
  if (s == "xyz") return MagFieldKnowledge::Xyz;
  throw ConfigError("unknown mag_field_knowledge '" + s + "'");
}

MagUsage usage_from(const std::string& s) {
  if (s == "none") return MagUsage::None;
  if (s == "horizontal") return MagUsage::Horizontal;
  if (s == "xyz") return MagUsage::Xyz;
  throw ConfigError("unknown mag_meas_usage '" + s + "'");
}

json run_to_json(const RunConfig& c) {
  const SensorConfig& s = c.sensors;
  const EstimatorParams& p = c.params;
  return {
      {"estimator", to_string(c.estimator)},
      {"scenario",
       {{"name", c.scenario.name},
        {"mag_field_knowledge", to_string(c.scenario.mag_field_knowledge)},
        {"mag_meas_usage", to_string(c.scenario.mag_meas_usage)},
        {"dynamic_gains", c.scenario.dynamic_gains}}},
      {"testcase", c.testcase},
      {"trajectory_path", c.trajectory_path},
      {"seed", c.seed},
      {"rate", c.rate},
      {"sensors",
       {{"accel_noise_std", s.accel_noise_std},
        {"gyro_noise_std", s.gyro_noise_std},
        {"gyro_bias_walk_std", s.gyro_bias_walk_std},
        {"gyro_bias_lpf_tau", s.gyro_bias_lpf_tau},
        {"mag_noise_std", s.mag_noise_std},
        {"gravity", mat_to_json(s.gravity)},
        {"mag_field", mat_to_json(s.mag_field)}}},
      {"detector",
       {{"t_high", c.detector.t_high},
        {"t_low", c.detector.t_low},
        {"window_s", c.detector.window_s},
        {"gravity_norm", c.detector.gravity_norm}}},
      {"params",
       {{"cf", schedule_json(p.cf, weights_json)},
        {"ekf", schedule_json(p.ekf, kalman_json)},
        {"ukf", schedule_json(p.ukf, kalman_json)},
        {"q_ekf", mat_to_json(p.q_ekf)},
        {"q_ukf", mat_to_json(p.q_ukf)},
        {"ukf_lambda", p.ukf_lambda},
        {"p0_att", p.p0_att},
        {"p0_bias", p.p0_bias}}},
      {"init_error", mat_to_json(c.init_error)},
  };
}

RunConfig run_from_json(const json& j) {
  RunConfig c;
  const std::string est = j.at("estimator").get<std::string>();
  const auto kind = estimator_kind_from_name(est);
  if (!kind) throw ConfigError("unknown estimator '" + est + "'");
  c.estimator = *kind;
  const json& sc = j.at("scenario");
  c.scenario.name = sc.at("name").get<std::string>();
  c.scenario.mag_field_knowledge = knowledge_from(sc.at("mag_field_knowledge").get<std::string>());
  c.scenario.mag_meas_usage = usage_from(sc.at("mag_meas_usage").get<std::string>());
  c.scenario.dynamic_gains = sc.at("dynamic_gains").get<bool>();
  c.testcase = j.at("testcase").get<std::string>();
  c.trajectory_path = j.at("trajectory_path").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.rate = j.at("rate").get<double>();

  const json& s = j.at("sensors");
  c.sensors.accel_noise_std = s.at("accel_noise_std").get<double>();
  c.sensors.gyro_noise_std = s.at("gyro_noise_std").get<double>();
  c.sensors.gyro_bias_walk_std = s.at("gyro_bias_walk_std").get<double>();
  c.sensors.gyro_bias_lpf_tau = s.at("gyro_bias_lpf_tau").get<double>();
  c.sensors.mag_noise_std = s.at("mag_noise_std").get<double>();
  c.sensors.gravity = mat_from_json<Vec3>(s.at("gravity"));
  c.sensors.mag_field = mat_from_json<Vec3>(s.at("mag_field"));

  const json& d = j.at("detector");
  c.detector = {d.at("t_high").get<double>(), d.at("t_low").get<double>(), d.at("window_s").get<double>(),
                d.at("gravity_norm").get<double>()};

  const json& p = j.at("params");
  c.params.cf = schedule_from<CfGains>(p.at("cf"), weights_from);
  c.params.ekf = schedule_from<KalmanGains>(p.at("ekf"), kalman_from);
  c.params.ukf = schedule_from<KalmanGains>(p.at("ukf"), kalman_from);
  c.params.q_ekf = mat_from_json<Mat6>(p.at("q_ekf"));
  c.params.q_ukf = mat_from_json<Mat6>(p.at("q_ukf"));
  c.params.ukf_lambda = p.at("ukf_lambda").get<double>();
  c.params.p0_att = p.at("p0_att").get<double>();
  c.params.p0_bias = p.at("p0_bias").get<double>();
  c.init_error = mat_from_json<Vec3>(j.at("init_error"));
  return c;
}

}  // namespace

std::string manifest_json(const std::vector<RunConfig>& configs) {
  json runs = json::array();
  for (const RunConfig& c : configs) runs.push_back(run_to_json(c));
  return json{{"format", "attest-manifest"}, {"version", 1}, {"runs", runs}}.dump(2) + "\n";
}

std::vector<RunConfig> parse_manifest(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "attest-manifest") throw ConfigError("not a run manifest");
    std::vector<RunConfig> out;
    for (const json& r : j.at("runs")) out.push_back(run_from_json(r));
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

std::vector<RunConfig> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

// ---------------------------------------------------------------- config file

namespace {

namespace pt = boost::property_tree;

// ini_parser keeps inline comments as part of the value.
std::optional<std::string> get_text(const pt::ptree& t, const std::string& key) {
  auto s = t.get_optional<std::string>(key);
  if (!s) return std::nullopt;
  const auto cut = s->find_first_of(";#");
  if (cut != std::string::npos) s->erase(cut);
  const auto b = s->find_first_not_of(" \t");
  const auto e = s->find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s->substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError(key + ": '" + tok + "' is not a number");
    v.push_back(x);
  }
  return v;
}

double get_scalar(const pt::ptree& t, const std::string& key, double fallback) {
  const auto s = get_text(t, key);
  if (!s) return fallback;
  const auto v = numbers(*s, key);
  if (v.size() != 1) throw ConfigError(key + ": expected one number");
  return v[0];
}

// One number broadcast to all axes, or three numbers.
Vec3 get_vec3(const pt::ptree& t, const std::string& key, const Vec3& fallback) {
  const auto s = get_text(t, key);
  if (!s) return fallback;
  const auto v = numbers(*s, key);
  if (v.size() == 1) return Vec3::Constant(v[0]);
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw ConfigError(key + ": expected one or three numbers");
}

bool get_bool(const pt::ptree& t, const std::string& key, bool fallback) {
  const auto s = get_text(t, key);
  if (!s) return fallback;
  if (*s == "on" || *s == "true" || *s == "1") return true;
  if (*s == "off" || *s == "false" || *s == "0") return false;
  throw ConfigError(key + ": expected on/off");
}

CfWeights cf_weights(const pt::ptree& t, const std::string& prefix, const CfWeights& fallback) {
  return {get_vec3(t, "cf." + prefix + "_wa", fallback.w_a), get_vec3(t, "cf." + prefix + "_wb", fallback.w_b)};
}

// Kalman sections hold raw sensor sigmas; they become unit-direction R here.
GainSchedule<KalmanGains> kalman_schedule(const pt::ptree& t, const std::string& sec, const double (&alphas)[4],
                                          double g_norm, double f_norm) {
  const auto a = [&](const char* key, double d) { return get_scalar(t, sec + "." + key, d); };
  GainSchedule<KalmanGains> s;
  s.nominal = {unit_direction_noise(a("accel_alpha", alphas[0]), g_norm),
               unit_direction_noise(a("mag_alpha", alphas[1]), f_norm)};
  s.low_dynamics = KalmanGains{unit_direction_noise(a("low_accel_alpha", alphas[2]), g_norm),
                               unit_direction_noise(a("low_mag_alpha", alphas[3]), f_norm)};
  return s;
}

}  // namespace

HarnessConfig HarnessConfig::load(const std::string& path) {
  pt::ptree t;
  try {
    pt::read_ini(path, t);
  } catch (const pt::ini_parser_error& e) {
    if (!fs::exists(path)) throw IoError("cannot open config " + path);
    throw ConfigError(e.what());
  }

  HarnessConfig c;
  try {
    c.seed = static_cast<std::uint64_t>(get_scalar(t, "run.seed", 1.0));
    c.rate = get_scalar(t, "run.rate", 100.0);

    SensorConfig& s = c.sensors;
    s.accel_noise_std = get_scalar(t, "sensors.accel_noise", s.accel_noise_std);
    s.gyro_noise_std = get_scalar(t, "sensors.gyro_noise_dps", s.gyro_noise_std * kRadToDeg) * kDegToRad;
    s.gyro_bias_walk_std =
        get_scalar(t, "sensors.gyro_bias_walk_dps_per_min", s.gyro_bias_walk_std * kRadToDeg) * kDegToRad;
    s.gyro_bias_lpf_tau = get_scalar(t, "sensors.gyro_bias_tau", s.gyro_bias_lpf_tau);
    s.mag_noise_std = get_scalar(t, "sensors.mag_noise", s.mag_noise_std);
    s.gravity = get_vec3(t, "sensors.gravity", s.gravity);
    s.mag_field = get_vec3(t, "sensors.mag_field", s.mag_field);

    DetectorConfig& d = c.detector;
    d.t_high = get_scalar(t, "detector.t_high", d.t_high);
    d.t_low = get_scalar(t, "detector.t_low", d.t_low);
    d.window_s = get_scalar(t, "detector.window_s", d.window_s);
    d.gravity_norm = get_scalar(t, "detector.gravity_norm", d.gravity_norm);

    const double g_norm = s.gravity.norm();
    const double f_norm = s.mag_field.norm();
    EstimatorParams& p = c.params;
    p = EstimatorParams::defaults(g_norm, f_norm);
    p.cf.nominal.accel = cf_weights(t, "accel", p.cf.nominal.accel);
    p.cf.nominal.mag = cf_weights(t, "mag", p.cf.nominal.mag);
    p.cf.low_dynamics->accel = cf_weights(t, "low_accel", p.cf.low_dynamics->accel);
    p.cf.low_dynamics->mag = cf_weights(t, "low_mag", p.cf.low_dynamics->mag);
    p.ekf = kalman_schedule(t, "ekf", {30.0, 0.47, 4.9, 0.094}, g_norm, f_norm);
    p.ukf = kalman_schedule(t, "ukf", {10.0, 0.24, 4.9, 0.094}, g_norm, f_norm);
    p.q_ekf = process_noise(get_scalar(t, "ekf.q_alpha_dps", 1.0) * kDegToRad,
                            get_scalar(t, "ekf.q_beta_dps_per_min", 0.5) * kDegToRad);
    p.q_ukf = process_noise(get_scalar(t, "ukf.q_alpha_dps", 1.0) * kDegToRad,
                            get_scalar(t, "ukf.q_beta_dps_per_min", 0.5) * kDegToRad);
    p.ukf_lambda = get_scalar(t, "ukf.lambda", p.ukf_lambda);
    p.p0_att = get_scalar(t, "init.p0_att_deg", p.p0_att * kRadToDeg) * kDegToRad;
    p.p0_bias = get_scalar(t, "init.p0_bias_dps", p.p0_bias * kRadToDeg) * kDegToRad;

    std::vector<ScenarioConfig> scenarios;
    for (const auto& [section, body] : t) {
      const std::string prefix = "scenario:";
      if (section.rfind(prefix, 0) != 0) continue;
      ScenarioConfig sc;
      sc.name = section.substr(prefix.size());
      sc.mag_field_knowledge = knowledge_from(get_text(body, "mag_field_knowledge").value_or("declination_only"));
      sc.mag_meas_usage = usage_from(get_text(body, "mag_meas_usage").value_or("horizontal"));
      sc.dynamic_gains = get_bool(body, "dynamic_gains", false);
      sc.validate();
      scenarios.push_back(sc);
    }
    if (!scenarios.empty()) c.scenarios = scenarios;

    if (const auto tc = t.get_child_optional("testcases")) {
      const fs::path base = fs::path(path).parent_path();
      for (const auto& [name, value] : *tc) {
        const std::string v = get_text(*tc, name).value_or("");
        if (v.empty()) continue;
        const fs::path resolved = fs::path(v).is_absolute() ? fs::path(v) : base / v;
        c.testcases[name] = resolved.lexically_normal().string();
      }
    }
  } catch (const pt::ptree_error& e) {
    throw ConfigError(std::string("config ") + path + ": " + e.what());
  }

  SensorConfig check = c.sensors;
  check.sample_rate = c.rate;
  check.validate();
  c.params.validate();
  return c;
}

const ScenarioConfig& HarnessConfig::scenario(const std::string& name) const {
  for (const ScenarioConfig& s : scenarios) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::vector<std::string> HarnessConfig::available_testcases() const {
  std::vector<std::string> out;
  for (MockupCase m : {MockupCase::LongHover, MockupCase::Easy, MockupCase::SlowRot, MockupCase::Mockup})
    out.emplace_back(to_string(m));
  std::vector<std::string> flights;
  for (const auto& [name, path] : testcases) flights.push_back(name);
  std::sort(flights.begin(), flights.end(), [](const std::string& a, const std::string& b) {
    return std::make_pair(rank_of(canonical_testcases(), a), a) < std::make_pair(rank_of(canonical_testcases(), b), b);
  });
  out.insert(out.end(), flights.begin(), flights.end());
  return out;
}

RunConfig HarnessConfig::make_run(EstimatorKind est, const std::string& scenario_name,
                                  const std::string& testcase) const {
  RunConfig r;
  r.estimator = est;
  r.scenario = scenario(scenario_name);
  r.testcase = testcase;
  if (!mockup_case_from_name(testcase)) {
    const auto it = testcases.find(testcase);
    if (it == testcases.end()) throw ConfigError("unknown test case '" + testcase + "'");
    r.trajectory_path = it->second;
  }
  r.seed = seed;
  r.rate = rate;
  r.sensors = sensors;
  r.detector = detector;
  r.params = params;
  return r;
}

}  // namespace attest
