#pragma once

// Batch runner: scenario x estimator x test-case matrices, metric tables and
// per-run time series.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attest/estimator.hpp"
#include "attest/metrics.hpp"
#include "attest/trajectory.hpp"

namespace attest {

struct ScenarioConfig {
  std::string name = "nominal";
  MagFieldKnowledge mag_field_knowledge = MagFieldKnowledge::DeclinationOnly;
  MagUsage mag_meas_usage = MagUsage::Horizontal;
  bool dynamic_gains = false;

  // nominal, no_mag, 3D_mag, dynamic_gains.
  static std::vector<ScenarioConfig> canonical();
  static std::optional<ScenarioConfig> canonical(const std::string& name);

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

// The nine test cases in increasing order of difficulty.
const std::vector<std::string>& canonical_testcases();

struct RunConfig {
  EstimatorKind estimator = EstimatorKind::Ekf;
  ScenarioConfig scenario;
  std::string testcase = "mockup_long_hover";
  std::string trajectory_path;  // required unless testcase is a mockup
  std::uint64_t seed = 1;
  double rate = 100.0;  // Hz
  SensorConfig sensors;
  DetectorConfig detector;
  EstimatorParams params = EstimatorParams::defaults();
  Vec3 init_error = Vec3::Zero();  // Euler vector composed onto the true initial attitude

  std::string label() const;  // scenario/testcase/estimator
  void validate() const;
};

struct TickRecord {
  double t = 0.0;
  Vec3 accel = Vec3::Zero();
  Vec3 gyro = Vec3::Zero();
  Quaternion q_true;
  Quaternion q_est;
  Vec3 b_true = Vec3::Zero();
  Vec3 b_est = Vec3::Zero();
  double mu_f = 0.0;
  bool low_dynamics = false;
};

struct RunResult {
  std::string scenario;
  std::string testcase;
  EstimatorKind estimator = EstimatorKind::Ekf;
  MetricsReport metrics;
  std::vector<ErrorSample> errors;
  std::vector<TickRecord> ticks;
  UpdateCounters counters;
  double wall_time_s = 0.0;  // not part of the outputs compared for determinism

  // Bit-level equality of everything except wall time.
  bool same_outputs(const RunResult& other) const;
};

// Failure inside a run, carrying the cell label.
class RunError : public Error {
 public:
  RunError(const std::string& label, const std::string& what) : Error(label + ": " + what), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

Trajectory resolve_trajectory(const RunConfig& cfg);

// Deterministic given cfg. Throws RunError.
RunResult run_case(const RunConfig& cfg);

struct CellResult {
  RunConfig config;
  std::optional<RunResult> result;
  std::string error;  // set when result is empty
};

struct MatrixReport {
  std::vector<CellResult> cells;  // sorted by scenario, test case, estimator

  bool all_ok() const;
  std::size_t failures() const;
};

// Runs every cell, up to `jobs` at a time (0 = hardware concurrency). A failing
// cell is recorded and the others continue.
MatrixReport run_matrix(const std::vector<RunConfig>& configs, unsigned jobs = 0);

struct OutputOptions {
  bool timeseries = true;
  bool manifest = true;
};

// summary.csv, errors.csv (only when a cell failed), runs/<scenario>/<testcase>/
// <estimator>/timeseries.csv, manifest.json. Throws IoError.
void emit_outputs(const MatrixReport& report, const std::string& outdir, const OutputOptions& opts = {});

inline constexpr const char* kSummaryHeader = "scenario,testcase,estimator,MaxEVz,MaxEVxy,FinH,FinPR";

std::string summary_csv(const MatrixReport& report);

// Manifest: JSON with every RunConfig, enough to replay the matrix exactly.
std::string manifest_json(const std::vector<RunConfig>& configs);
std::vector<RunConfig> parse_manifest(const std::string& json_text);
std::vector<RunConfig> load_manifest(const std::string& path);

// Settings shared by all runs of a matrix, read from an INI-style file.
struct HarnessConfig {
  std::uint64_t seed = 1;
  double rate = 100.0;
  SensorConfig sensors;
  DetectorConfig detector;
  EstimatorParams params = EstimatorParams::defaults();
  std::vector<ScenarioConfig> scenarios = ScenarioConfig::canonical();
  std::map<std::string, std::string> testcases;  // flight case name -> CSV path

  // Throws ConfigError / IoError. Relative test-case paths are resolved
  // against the config file's directory.
  static HarnessConfig load(const std::string& path);

  const ScenarioConfig& scenario(const std::string& name) const;
  // The four mockups followed by every configured flight case.
  std::vector<std::string> available_testcases() const;

  RunConfig make_run(EstimatorKind est, const std::string& scenario, const std::string& testcase) const;
};

}  // namespace attest
