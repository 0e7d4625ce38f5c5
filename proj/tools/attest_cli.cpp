// attest: run attitude-estimator experiments from the command line.
//
//   attest run --scenario nominal --estimator ekf --testcase mockup [--out dir]
//   attest run --manifest out/manifest.json --out replay
//   attest matrix --config configs/default.ini --out results
//   attest gen-mockup --testcase mockup_easy --rate 100 --out easy.csv
//   attest validate-trajectory data/sample_flight.csv
//
// Exit status: 0 success, 1 a run or file failed, 2 configuration error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attest/harness.hpp"

namespace {

using namespace attest;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> rate;
  std::string out;
  unsigned jobs = 0;
  bool no_timeseries = false;
};

HarnessConfig load_harness(const CommonOptions& o) {
  HarnessConfig h = o.config.empty() ? HarnessConfig{} : HarnessConfig::load(o.config);
  if (o.seed) h.seed = *o.seed;
  if (o.rate) h.rate = *o.rate;
  return h;
}

EstimatorKind parse_estimator(const std::string& s) {
  const auto k = estimator_kind_from_name(s);
  if (!k) throw ConfigError("unknown estimator '" + s + "' (expected cf, ekf or ukf)");
  return *k;
}

void print_metrics(const MatrixReport& report) {
  std::printf("%-14s %-18s %-4s %9s %9s %9s %9s\n", "scenario", "testcase", "est", "MaxEVz", "MaxEVxy", "FinH",
              "FinPR");
  for (const CellResult& c : report.cells) {
    if (c.result) {
      const MetricsReport& m = c.result->metrics;
      std::printf("%-14s %-18s %-4s %9.3f %9.3f %9.3f %9.3f\n", c.config.scenario.name.c_str(),
                  c.config.testcase.c_str(), to_string(c.config.estimator), m.max_ev_z, m.max_ev_xy, m.fin_h,
                  m.fin_pr);
    } else {
      std::printf("%-14s %-18s %-4s FAILED: %s\n", c.config.scenario.name.c_str(), c.config.testcase.c_str(),
                  to_string(c.config.estimator), c.error.c_str());
    }
  }
}

int finish(const std::vector<RunConfig>& configs, const CommonOptions& o) {
  const MatrixReport report = run_matrix(configs, o.jobs);
  print_metrics(report);
  if (!o.out.empty()) {
    emit_outputs(report, o.out, {.timeseries = !o.no_timeseries, .manifest = true});
    std::printf("wrote %s\n", o.out.c_str());
  }
  return report.all_ok() ? 0 : kExitFailure;
}

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Noise seed");
  app->add_option("--rate", o.rate, "Simulation rate, Hz")->check(CLI::PositiveNumber);
  app->add_option("--jobs", o.jobs, "Concurrent runs (0 = all cores)");
  app->add_flag("--no-timeseries", o.no_timeseries, "Skip per-run timeseries.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attitude estimator test harness"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_scenario = "nominal";
  std::string run_estimator = "ekf";
  std::string run_testcase = "mockup_long_hover";
  std::string manifest;
  auto* run = app.add_subcommand("run", "Run a single case, or replay a manifest");
  add_common(run, run_opts);
  run->add_option("--scenario", run_scenario, "Scenario name");
  run->add_option("--estimator", run_estimator, "cf, ekf or ukf");
  run->add_option("--testcase", run_testcase, "Test case name");
  run->add_option("--manifest", manifest, "Replay every run in a manifest")->check(CLI::ExistingFile);
  run->add_option("--out", run_opts.out, "Output directory");

  CommonOptions mat_opts;
  mat_opts.out = "results";
  std::vector<std::string> mat_scenarios;
  std::vector<std::string> mat_estimators;
  std::vector<std::string> mat_testcases;
  auto* matrix = app.add_subcommand("matrix", "Run scenario x test case x estimator");
  add_common(matrix, mat_opts);
  matrix->add_option("--scenario", mat_scenarios, "Scenario (repeatable; default all)");
  matrix->add_option("--estimator", mat_estimators, "Estimator (repeatable; default all)");
  matrix->add_option("--testcase", mat_testcases, "Test case (repeatable; default all available)");
  matrix->add_option("--out", mat_opts.out, "Output directory")->capture_default_str();

  std::string gen_testcase = "mockup";
  double gen_rate = 100.0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-mockup", "Write a mockup truth trajectory as CSV");
  gen->add_option("--testcase", gen_testcase, "mockup_long_hover, mockup_easy, mockup_slowrot or mockup");
  gen->add_option("--rate", gen_rate, "Sample rate, Hz")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output CSV file")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate-trajectory", "Parse and check a trajectory CSV");
  validate->add_option("path", validate_path, "Trajectory CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      if (!manifest.empty()) return finish(load_manifest(manifest), run_opts);
      const HarnessConfig h = load_harness(run_opts);
      return finish({h.make_run(parse_estimator(run_estimator), run_scenario, run_testcase)}, run_opts);
    }
    if (*matrix) {
      const HarnessConfig h = load_harness(mat_opts);
      if (mat_scenarios.empty())
        for (const ScenarioConfig& s : h.scenarios) mat_scenarios.push_back(s.name);
      if (mat_estimators.empty()) mat_estimators = {"cf", "ekf", "ukf"};
      if (mat_testcases.empty()) mat_testcases = h.available_testcases();
      std::vector<RunConfig> configs;
      for (const auto& s : mat_scenarios)
        for (const auto& t : mat_testcases)
          for (const auto& e : mat_estimators) configs.push_back(h.make_run(parse_estimator(e), s, t));
      return finish(configs, mat_opts);
    }
    if (*gen) {
      const auto kind = mockup_case_from_name(gen_testcase);
      if (!kind) throw ConfigError("'" + gen_testcase + "' is not a mockup test case");
      save_trajectory(gen_mockup(MockupSpec::canonical(*kind), gen_rate), gen_out);
      std::printf("wrote %s\n", gen_out.c_str());
      return 0;
    }
    if (*validate) {
      const Trajectory t = load_trajectory(validate_path);
      std::printf("%s: ok, %zu samples, %.3f s, %.3f Hz\n", validate_path.c_str(), t.samples.size(), t.duration(),
                  t.rate);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
