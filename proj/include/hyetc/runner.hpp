// Copyright 2026 The hyetc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file runner.hpp
 * @brief Scenario runs and run suites, writing the artifacts consumed by the
 * plotting scripts: trace.csv, events.csv and summary.json under
 * <out>/<scenario>/<variant>/, plus index.json for a suite.
 */

#pragma once

#include "hyetc/metrics.hpp"
#include "hyetc/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hyetc::runner {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kAborted = 3,
  kMissingDependency = 4,
};

struct RunSpec {
  std::string scenario = "attitude";  // "linear" or "attitude"
  Variant variant = Variant::Ours;
  double rho = 0.0;
  std::uint64_t seed = 1;
  double horizon = 100.0;
  std::string out_root;     // empty: $HYETC_OUT, else "out"
  std::string config_path;  // empty: built-in defaults
  bool exact_sensor = false;
  double record_interval = 0.01;  // spacing of recorded flow samples, seconds
  std::optional<double> period_b;  // variant b; read from the ours run when absent

  /// Throws ConfigError.
  void validate() const;
};

struct RunOutcome {
  int exit_code = kOk;
  std::string message;
  std::string out_dir;
  std::string termination;
  int total_transmissions = 0;
  std::optional<double> t_star;
  double liminf_inter_tx = 0.0;
  int pflow_n = 0;
  double pflow_tau = 0.0;
  int max_consecutive_jumps = 0;
};

/// In-memory result of one run.
struct Simulation {
  Scenario scenario;
  hybrid::RunRecord record;
  metrics::MetricsReport report;
  double period_b = 0.0;  // variant b only
  double dt = 0.0;
};

std::string default_out_root();

/// Builds the scenario selected by `spec` (loading its config), solves it and
/// analyzes the record. No files are touched; for variant b `spec.period_b`
/// must be set. Throws Error on configuration problems.
Simulation simulate(const RunSpec& spec);

/// simulate() plus the three artifact files. Never throws; failures map to exit codes.
RunOutcome run_scenario(const RunSpec& spec);

struct SuiteEntry {
  RunSpec spec;
  RunOutcome outcome;
};

/// Runs the suite file {"runs": [...]}: independent runs in parallel first,
/// then every variant b run. Writes index.json into the suite's output root.
/// Returns 0 when every run succeeded, else the largest exit code seen.
int run_suite(const std::string& suite_path, std::vector<SuiteEntry>* entries = nullptr);

/// Period for variant b taken from <out_root>/<scenario>/ours/summary.json.
/// Throws MissingDependency when absent or without a finite liminf.
double period_from_ours(const std::string& out_root, const std::string& scenario);

}  // namespace hyetc::runner
