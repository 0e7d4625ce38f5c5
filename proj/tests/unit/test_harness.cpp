#include <filesystem>
#include <fstream>
#include <sstream>

#include "attest/harness.hpp"
#include "test_util.hpp"

using namespace attest;

namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("attest_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Ten seconds of slow yaw at 50 Hz with a vertical climb pulse.
void write_flight(const fs::path& path) {
  Trajectory t;
  t.rate = 50.0;
  for (int k = 0; k <= 500; ++k) {
    TruthSample s;
    s.t = 0.02 * k;
    s.w = Vec3(0, 0, 0.1);
    s.q = vec3_to_quat(AttitudeVec3(Rep::EulerVector, {0, 0, 0.1 * s.t}));
    s.rddot = Vec3(0, 0, s.t < 2.0 ? 1.0 : 0.0);
    t.samples.push_back(s);
  }
  save_trajectory(t, path.string());
}

RunConfig base_run(EstimatorKind est, const std::string& scenario, const std::string& testcase) {
  RunConfig r;
  r.estimator = est;
  r.scenario = *ScenarioConfig::canonical(scenario);
  r.testcase = testcase;
  r.rate = 50.0;
  return r;
}

}  // namespace

TEST(ScenarioConfig, CanonicalTable) {
  const auto s = ScenarioConfig::canonical();
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0], (ScenarioConfig{"nominal", MagFieldKnowledge::DeclinationOnly, MagUsage::Horizontal, false}));
  EXPECT_EQ(s[1].name, "no_mag");
  EXPECT_EQ(s[1].mag_meas_usage, MagUsage::None);
  EXPECT_EQ(s[2], (ScenarioConfig{"3D_mag", MagFieldKnowledge::Xyz, MagUsage::Xyz, false}));
  EXPECT_EQ(s[3], (ScenarioConfig{"dynamic_gains", MagFieldKnowledge::DeclinationOnly, MagUsage::Horizontal, true}));
  EXPECT_FALSE(ScenarioConfig::canonical("windy").has_value());
  EXPECT_THROW((ScenarioConfig{"bad", MagFieldKnowledge::DeclinationOnly, MagUsage::Xyz, false}.validate()),
               ConfigError);
}

TEST(CanonicalTestcases, NineInOrder) {
  const auto& t = canonical_testcases();
  ASSERT_EQ(t.size(), 9u);
  EXPECT_EQ(t.front(), "mockup_long_hover");
  EXPECT_EQ(t[3], "mockup");
  EXPECT_EQ(t.back(), "longturn");
}

TEST(RunMatrix, NineCasesTimesThreeEstimators) {
  TempDir dir("matrix27");
  std::vector<RunConfig> configs;
  for (const std::string& tc : canonical_testcases()) {
    for (EstimatorKind e : {EstimatorKind::Ukf, EstimatorKind::Cf, EstimatorKind::Ekf}) {
      RunConfig r = base_run(e, "nominal", tc);
      r.rate = 100.0;
      if (!mockup_case_from_name(tc)) {
        r.trajectory_path = (dir.path() / (tc + ".csv")).string();
        if (!fs::exists(r.trajectory_path)) write_flight(r.trajectory_path);
      }
      configs.push_back(r);
    }
  }
  std::reverse(configs.begin(), configs.end());
  const MatrixReport report = run_matrix(configs, 2);
  ASSERT_EQ(report.cells.size(), 27u);
  for (const CellResult& c : report.cells) EXPECT_TRUE(c.result.has_value()) << c.config.label() << ": " << c.error;
  EXPECT_TRUE(report.all_ok());

  const std::string csv = summary_csv(report);
  EXPECT_EQ(line_count(csv), 28u);
  // Sorted by test case order, then estimator.
  EXPECT_EQ(report.cells[0].config.testcase, "mockup_long_hover");
  EXPECT_EQ(report.cells[0].config.estimator, EstimatorKind::Cf);
  EXPECT_EQ(report.cells[2].config.estimator, EstimatorKind::Ukf);
  EXPECT_EQ(report.cells[26].config.testcase, "longturn");
}

TEST(RunMatrix, FailingIngestIsReportedPerCell) {
  TempDir dir("matrix_fail");
  const fs::path flight = dir.path() / "flight.csv";
  write_flight(flight);
  std::vector<RunConfig> configs;
  for (const std::string& tc : canonical_testcases()) {
    for (EstimatorKind e : {EstimatorKind::Cf, EstimatorKind::Ekf, EstimatorKind::Ukf}) {
      RunConfig r = base_run(e, "nominal", tc);
      r.rate = 100.0;
      if (!mockup_case_from_name(tc)) {
        const bool broken = tc == "straightflight" && e == EstimatorKind::Ekf;
        r.trajectory_path = broken ? (dir.path() / "missing.csv").string() : flight.string();
      }
      configs.push_back(r);
    }
  }
  const MatrixReport report = run_matrix(configs);
  EXPECT_EQ(report.cells.size(), 27u);
  EXPECT_EQ(report.failures(), 1u);
  EXPECT_FALSE(report.all_ok());
  const auto bad = std::find_if(report.cells.begin(), report.cells.end(), [](const CellResult& c) { return !c.result; });
  ASSERT_NE(bad, report.cells.end());
  EXPECT_EQ(bad->config.testcase, "straightflight");
  EXPECT_NE(bad->error.find("nominal/straightflight/ekf"), std::string::npos) << bad->error;

  emit_outputs(report, (dir.path() / "out").string(), {.timeseries = false, .manifest = false});
  EXPECT_EQ(line_count(read_file(dir.path() / "out" / "summary.csv")), 27u);
  const std::string errors = read_file(dir.path() / "out" / "errors.csv");
  EXPECT_EQ(line_count(errors), 2u);
  EXPECT_NE(errors.find("straightflight,ekf"), std::string::npos);
}

TEST(RunMatrix, EmptyMatrix) {
  const MatrixReport report = run_matrix({});
  EXPECT_TRUE(report.cells.empty());
  EXPECT_TRUE(report.all_ok());
  EXPECT_EQ(summary_csv(report), std::string(kSummaryHeader) + "\n");
}

TEST(EmitOutputs, SummaryTimeseriesAndManifest) {
  TempDir dir("emit");
  std::vector<RunConfig> configs{base_run(EstimatorKind::Ekf, "nominal", "mockup_long_hover"),
                                 base_run(EstimatorKind::Cf, "3D_mag", "mockup_easy")};
  const MatrixReport report = run_matrix(configs);
  ASSERT_TRUE(report.all_ok());
  emit_outputs(report, dir.path().string());

  const std::string summary = read_file(dir.path() / "summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "scenario,testcase,estimator,MaxEVz,MaxEVxy,FinH,FinPR");
  EXPECT_FALSE(fs::exists(dir.path() / "errors.csv"));

  const fs::path ts = dir.path() / "runs" / "nominal" / "mockup_long_hover" / "ekf" / "timeseries.csv";
  ASSERT_TRUE(fs::exists(ts));
  const std::string text = read_file(ts);
  EXPECT_EQ(line_count(text), 120u * 50u + 1u + 1u);  // rows plus header
  const std::string header = text.substr(0, text.find('\n'));
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 25);
  EXPECT_EQ(header.rfind("t,accel_x", 0), 0u);
  EXPECT_NE(header.find("low_dynamics"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path() / "runs" / "3D_mag" / "mockup_easy" / "cf" / "timeseries.csv"));

  const std::vector<RunConfig> replay = load_manifest((dir.path() / "manifest.json").string());
  ASSERT_EQ(replay.size(), 2u);
  const MatrixReport again = run_matrix(replay);
  EXPECT_EQ(summary_csv(again), summary);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(again.cells[i].result->same_outputs(*report.cells[i].result));
}

TEST(EmitOutputs, UnwritableDirectory) {
  TempDir dir("emit_bad");
  const fs::path blocker = dir.path() / "file";
  std::ofstream(blocker) << "x";
  EXPECT_THROW(emit_outputs(MatrixReport{}, (blocker / "sub").string()), IoError);
}

TEST(Manifest, RoundTripsEveryField) {
  RunConfig r = base_run(EstimatorKind::Ukf, "dynamic_gains", "straightup");
  r.trajectory_path = "/data/straightup.csv";
  r.seed = 0xfedcba9876543210ull;
  r.rate = 123.456;
  r.sensors.mag_field = Vec3(0.1 / 3.0, -0.2, 0.45);
  r.detector.t_low = 0.65;
  r.params.p0_bias = 0.1234567890123;
  r.params.cf.nominal.accel.w_a = Vec3(0.1, 0.2, 0.3);
  r.params.ukf.low_dynamics->r_mag(1, 1) = 0.0421;
  r.init_error = Vec3(0.01, -0.02, 0.03);

  const std::vector<RunConfig> back = parse_manifest(manifest_json({r}));
  ASSERT_EQ(back.size(), 1u);
  const RunConfig& b = back[0];
  EXPECT_EQ(b.label(), r.label());
  EXPECT_EQ(b.scenario, r.scenario);
  EXPECT_EQ(b.trajectory_path, r.trajectory_path);
  EXPECT_EQ(b.seed, r.seed);
  EXPECT_EQ(b.rate, r.rate);
  EXPECT_EQ(b.sensors.mag_field, r.sensors.mag_field);
  EXPECT_EQ(b.detector.t_low, r.detector.t_low);
  EXPECT_EQ(b.params.p0_bias, r.params.p0_bias);
  EXPECT_EQ(b.params.cf.nominal.accel.w_a, r.params.cf.nominal.accel.w_a);
  EXPECT_EQ(b.params.ukf.low_dynamics->r_mag, r.params.ukf.low_dynamics->r_mag);
  EXPECT_EQ(b.params.q_ekf, r.params.q_ekf);
  EXPECT_EQ(b.init_error, r.init_error);

  EXPECT_THROW(parse_manifest("{\"runs\": 3}"), ConfigError);
  EXPECT_THROW(parse_manifest("not json"), ConfigError);
}

TEST(RunCase, NoMagNeverCallsMagUpdate) {
  TempDir dir("nomag");
  write_flight(dir.path() / "f.csv");
  for (EstimatorKind e : {EstimatorKind::Cf, EstimatorKind::Ekf, EstimatorKind::Ukf}) {
    RunConfig c = base_run(e, "no_mag", "straightup");
    c.trajectory_path = (dir.path() / "f.csv").string();
    const RunResult r = run_case(c);
    EXPECT_EQ(r.counters.mag_updates, 0u) << to_string(e);
    EXPECT_EQ(r.counters.accel_updates, 500u);
    EXPECT_EQ(r.counters.propagations, 500u);
    c.scenario = *ScenarioConfig::canonical("nominal");
    EXPECT_EQ(run_case(c).counters.mag_updates, 500u);
  }
}

TEST(RunCase, SameSeedIsBitIdentical) {
  RunConfig c = base_run(EstimatorKind::Ukf, "nominal", "mockup_easy");
  const RunResult a = run_case(c);
  const RunResult b = run_case(c);
  EXPECT_TRUE(a.same_outputs(b));
  c.seed = 2;
  EXPECT_FALSE(a.same_outputs(run_case(c)));
}

TEST(RunCase, SeriesLengthsMatch) {
  const RunResult r = run_case(base_run(EstimatorKind::Cf, "nominal", "mockup_slowrot"));
  EXPECT_EQ(r.errors.size(), 6001u);
  EXPECT_EQ(r.ticks.size(), r.errors.size());
  EXPECT_EQ(r.ticks.front().t, 0.0);
  EXPECT_DOUBLE_EQ(r.ticks.back().t, 120.0);
  EXPECT_GT(r.wall_time_s, 0.0);
}

TEST(RunCase, ScenarioDoesNotShiftAccelDraws) {
  const RunResult a = run_case(base_run(EstimatorKind::Ekf, "nominal", "mockup_easy"));
  const RunResult b = run_case(base_run(EstimatorKind::Ekf, "no_mag", "mockup_easy"));
  const RunResult c = run_case(base_run(EstimatorKind::Cf, "3D_mag", "mockup_easy"));
  ASSERT_EQ(a.ticks.size(), b.ticks.size());
  for (std::size_t i = 0; i < a.ticks.size(); ++i) {
    ASSERT_EQ(a.ticks[i].accel, b.ticks[i].accel);
    ASSERT_EQ(a.ticks[i].accel, c.ticks[i].accel);
    ASSERT_EQ(a.ticks[i].gyro, c.ticks[i].gyro);
  }
}

TEST(RunCase, DynamicGainsWithSilentDetectorEqualsNominal) {
  for (EstimatorKind e : {EstimatorKind::Cf, EstimatorKind::Ekf, EstimatorKind::Ukf}) {
    RunConfig nominal = base_run(e, "nominal", "mockup_long_hover");
    nominal.detector.t_low = 0.0;  // mu_f < 0 is impossible
    RunConfig dynamic = nominal;
    dynamic.scenario.dynamic_gains = true;
    const RunResult a = run_case(nominal);
    const RunResult b = run_case(dynamic);
    EXPECT_TRUE(a.same_outputs(b)) << to_string(e);
  }
}

TEST(RunCase, ErrorsCarryTheLabel) {
  RunConfig r = base_run(EstimatorKind::Cf, "nominal", "straightup");
  r.trajectory_path = "/nonexistent/straightup.csv";
  try {
    run_case(r);
    FAIL() << "expected RunError";
  } catch (const RunError& e) {
    EXPECT_EQ(e.label(), "nominal/straightup/cf");
  }
  r.trajectory_path.clear();
  EXPECT_THROW(run_case(r), RunError);
}

TEST(RunCase, FlightIsResampledToRunRate) {
  TempDir dir("resampled");
  write_flight(dir.path() / "f.csv");
  RunConfig r = base_run(EstimatorKind::Ekf, "nominal", "straightup");
  r.trajectory_path = (dir.path() / "f.csv").string();
  r.rate = 100.0;
  const RunResult res = run_case(r);
  EXPECT_EQ(res.ticks.size(), 1001u);
}

TEST(HarnessConfig, LoadsShippedDefaults) {
  const HarnessConfig h = HarnessConfig::load(std::string(ATTEST_CONFIG_DIR) + "/default.ini");
  EXPECT_EQ(h.seed, 1u);
  EXPECT_EQ(h.rate, 100.0);
  ASSERT_EQ(h.scenarios.size(), 4u);
  for (const ScenarioConfig& s : ScenarioConfig::canonical()) EXPECT_EQ(h.scenario(s.name), s);
  EXPECT_DOUBLE_EQ(h.sensors.gyro_noise_std, SensorConfig{}.gyro_noise_std);
  EXPECT_EQ(h.params.q_ekf, EstimatorParams::defaults().q_ekf);
  EXPECT_EQ(h.params.ekf.nominal.r_accel, EstimatorParams::defaults().ekf.nominal.r_accel);
  EXPECT_EQ(h.params.cf.low_dynamics->mag.w_a, Vec3::Constant(0.02));

  const auto tcs = h.available_testcases();
  ASSERT_EQ(tcs.size(), 5u);
  EXPECT_EQ(tcs.back(), "sample_flight");
  EXPECT_TRUE(fs::exists(h.testcases.at("sample_flight")));

  const RunConfig r = h.make_run(EstimatorKind::Ukf, "3D_mag", "sample_flight");
  EXPECT_EQ(r.trajectory_path, h.testcases.at("sample_flight"));
  EXPECT_EQ(r.scenario.mag_meas_usage, MagUsage::Xyz);
  EXPECT_THROW(h.make_run(EstimatorKind::Ukf, "windy", "mockup"), ConfigError);
  EXPECT_THROW(h.make_run(EstimatorKind::Ukf, "nominal", "longturn"), ConfigError);
}

TEST(HarnessConfig, OverridesAndErrors) {
  TempDir dir("ini");
  const fs::path ini = dir.path() / "c.ini";
  std::ofstream(ini) << "[run]\nseed = 7 ; lucky\nrate = 50\n[cf]\naccel_wa = 0.1 0.2 0.3\n"
                        "[scenario:quiet]\nmag_meas_usage = none\n[testcases]\nstraightup = flights/up.csv\n";
  const HarnessConfig h = HarnessConfig::load(ini.string());
  EXPECT_EQ(h.seed, 7u);
  EXPECT_EQ(h.rate, 50.0);
  EXPECT_EQ(h.params.cf.nominal.accel.w_a, Vec3(0.1, 0.2, 0.3));
  ASSERT_EQ(h.scenarios.size(), 1u);
  EXPECT_EQ(h.scenarios[0].mag_meas_usage, MagUsage::None);
  EXPECT_EQ(h.testcases.at("straightup"), (dir.path() / "flights" / "up.csv").string());

  std::ofstream(ini) << "[run]\nrate = fast\n";
  EXPECT_THROW(HarnessConfig::load(ini.string()), ConfigError);
  std::ofstream(ini) << "[cf]\naccel_wa = 2\n";
  EXPECT_THROW(HarnessConfig::load(ini.string()), ConfigError);
  std::ofstream(ini) << "[scenario:x]\nmag_meas_usage = sideways\n";
  EXPECT_THROW(HarnessConfig::load(ini.string()), ConfigError);
  EXPECT_THROW(HarnessConfig::load((dir.path() / "missing.ini").string()), IoError);
}
