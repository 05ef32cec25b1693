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

#pragma once

#include "hyetc/etc_loop.hpp"
#include "hyetc/hybrid.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hyetc::metrics {

struct DistRow {
  double t = 0.0;
  int j = 0;
  double dist_a = 0.0;
  double dist_a0 = 0.0;
  double dist_as = 0.0;
};

/// j <= t / tau + N at every recorded (t, j).
struct PflowFit {
  double tau = 0.0;
  int n = 0;
  bool replay_ok = false;
};

struct AnalyzeOptions {
  double horizon = 100.0;
  int max_consecutive_jumps = 8;
  double tail_fraction = 0.5;  // liminf window = final fraction of the horizon
  double t_star_hit = 1e-9;
  double t_star_stay = 1e-6;
};

struct MetricsReport {
  std::vector<DistRow> dist_series;
  // Instants with at least one transmission-class event; simultaneous
  // transmissions count once.
  std::vector<double> transmissions;
  // Gaps between successive transmission instants, the first one measured from t = 0.
  std::vector<double> inter_tx;
  double liminf_inter_tx = std::numeric_limits<double>::infinity();
  double liminf_window_start = 0.0;
  std::map<std::string, int> jump_census;
  int max_consecutive_jumps = 0;
  PflowFit pflow;
  bool zeno = false;
  std::optional<double> t_star;  // first sample with dist_As <= hit that never exceeds stay later
  hybrid::Termination termination = hybrid::Termination::Horizon;
};

MetricsReport analyze(const hybrid::RunRecord& run, const etc::TargetSets& sets,
                      const std::vector<std::string>& tx_branches, const AnalyzeOptions& opt = {});

/// Smallest N over a logarithmic tau grid, then the largest tau reaching it.
PflowFit fit_persistent_flow(const std::vector<hybrid::HybridTime>& times);

/// Replays j <= t / tau + N over the given times.
bool pflow_holds(const std::vector<hybrid::HybridTime>& times, const PflowFit& fit);

/// Writes trace.csv and events.csv into `dir` (created if missing). Throws IoError.
void export_csv(const MetricsReport& report, const hybrid::RunRecord& run,
                const std::vector<std::string>& tx_branches, const std::string& dir);

/// Reads a trace.csv back. Throws IoError on a malformed file.
std::vector<DistRow> read_trace_csv(const std::string& path);

/// printf("%.12g") of v.
std::string format_number(double v);

}  // namespace hyetc::metrics
