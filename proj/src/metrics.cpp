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

#include "hyetc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace hyetc::metrics {

namespace {

bool is_tx(const std::set<std::string>& ids, const std::string& b) { return ids.count(b) != 0; }

int pflow_n(const std::vector<hybrid::HybridTime>& times, double tau) {
  double worst = 0.0;
  for (const auto& h : times) worst = std::max(worst, std::ceil(h.j - h.t / tau));
  return static_cast<int>(worst);
}

std::vector<hybrid::HybridTime> arc_times(const hybrid::RunRecord& run) {
  std::vector<hybrid::HybridTime> out;
  out.reserve(run.samples.size() + run.events.size());
  for (const auto& s : run.samples) out.push_back(s.time);
  for (const auto& e : run.events) out.push_back(e.time);
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

PflowFit fit_persistent_flow(const std::vector<hybrid::HybridTime>& times) {
  // tau from 1e-6 to 1e3, ten points per decade
  PflowFit best;
  best.n = std::numeric_limits<int>::max();
  for (int k = 0; k <= 90; ++k) {
    const double tau = std::pow(10.0, -6.0 + k / 10.0);
    const int n = pflow_n(times, tau);
    if (n < best.n || (n == best.n && tau > best.tau)) {
      best.n = n;
      best.tau = tau;
    }
  }
  best.replay_ok = pflow_holds(times, best);
  return best;
}

bool pflow_holds(const std::vector<hybrid::HybridTime>& times, const PflowFit& fit) {
  return std::all_of(times.begin(), times.end(),
                     [&](const hybrid::HybridTime& h) { return h.j - h.t / fit.tau <= fit.n; });
}

MetricsReport analyze(const hybrid::RunRecord& run, const etc::TargetSets& sets,
                      const std::vector<std::string>& tx_branches, const AnalyzeOptions& opt) {
  MetricsReport r;
  r.termination = run.termination;

  r.dist_series.reserve(run.samples.size());
  for (const auto& s : run.samples) {
    r.dist_series.push_back({s.time.t, s.time.j, sets.a(s.state), sets.a0(s.state), sets.as(s.state)});
  }

  // t*: scan backwards for the running maximum of dist_As
  double tail_max = 0.0;
  for (std::size_t i = r.dist_series.size(); i-- > 0;) {
    const auto& row = r.dist_series[i];
    tail_max = std::max(tail_max, row.dist_as);
    if (tail_max > opt.t_star_stay) break;
    if (row.dist_as <= opt.t_star_hit) r.t_star = row.t;
  }

  const std::set<std::string> ids(tx_branches.begin(), tx_branches.end());
  double last_t = std::numeric_limits<double>::quiet_NaN();
  int run_len = 0;
  for (const auto& e : run.events) {
    ++r.jump_census[e.branch];
    run_len = (e.time.t == last_t) ? run_len + 1 : 1;
    last_t = e.time.t;
    r.max_consecutive_jumps = std::max(r.max_consecutive_jumps, run_len);
    if (is_tx(ids, e.branch) && (r.transmissions.empty() || r.transmissions.back() != e.time.t)) {
      r.transmissions.push_back(e.time.t);
    }
  }

  double prev = 0.0;
  r.liminf_window_start = opt.horizon * (1.0 - opt.tail_fraction);
  for (double t : r.transmissions) {
    const double gap = t - prev;
    prev = t;
    if (gap <= 0.0) continue;  // transmission at t = 0
    r.inter_tx.push_back(gap);
    if (t >= r.liminf_window_start) r.liminf_inter_tx = std::min(r.liminf_inter_tx, gap);
  }

  r.pflow = fit_persistent_flow(arc_times(run));

  r.zeno = r.max_consecutive_jumps > opt.max_consecutive_jumps ||
           run.termination == hybrid::Termination::ZenoGuard;
  if (!r.zeno && run.termination == hybrid::Termination::JumpBudget && run.events.size() > 10) {
    // jump budget exhausted while event spacing collapsed
    bool collapsed = true;
    for (std::size_t i = run.events.size() - 10; i < run.events.size(); ++i) {
      collapsed = collapsed && run.events[i].time.t - run.events[i - 1].time.t < 1e-9;
    }
    r.zeno = collapsed;
  }
  return r;
}

void export_csv(const MetricsReport& report, const hybrid::RunRecord& run,
                const std::vector<std::string>& tx_branches, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir + "': " + ec.message());

  const auto open = [&](const char* name) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, std::string("cannot write ") + name + " in '" + dir + "'");
    return out;
  };

  {
    std::ofstream out = open("trace.csv");
    out << "t,j,dist_A,dist_As,dist_A0,branch_event\n";
    std::size_t ev = 0;
    for (const auto& row : report.dist_series) {
      // the sample produced by an event carries the event's hybrid time
      while (ev < run.events.size() &&
             (run.events[ev].time.t < row.t ||
              (run.events[ev].time.t == row.t && run.events[ev].time.j < row.j))) {
        ++ev;
      }
      const bool from_event = ev < run.events.size() && run.events[ev].time.t == row.t &&
                              run.events[ev].time.j == row.j;
      out << format_number(row.t) << ',' << row.j << ',' << format_number(row.dist_a) << ','
          << format_number(row.dist_as) << ',' << format_number(row.dist_a0) << ','
          << (from_event ? run.events[ev].branch : std::string()) << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for trace.csv");
  }
  {
    std::ofstream out = open("events.csv");
    out << "t,j,branch_id,inter_tx\n";
    const std::set<std::string> ids(tx_branches.begin(), tx_branches.end());
    double prev_tx = 0.0;
    bool any_tx = false;
    for (const auto& e : run.events) {
      out << format_number(e.time.t) << ',' << e.time.j << ',' << e.branch << ',';
      if (is_tx(ids, e.branch) && (!any_tx || e.time.t != prev_tx)) {
        const double gap = e.time.t - prev_tx;
        if (gap > 0.0) out << format_number(gap);
        prev_tx = e.time.t;
        any_tx = true;
      }
      out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for events.csv");
  }
}

std::vector<DistRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "t,j,dist_A,dist_As,dist_A0,branch_event") {
    throw Error(ErrorCode::IoError, "'" + path + "' lacks the trace header");
  }
  std::vector<DistRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f[6];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, f[i], ',')) throw Error(ErrorCode::IoError, "short row in '" + path + "'");
    }
    DistRow r;
    try {
      r.t = std::stod(f[0]);
      r.j = std::stoi(f[1]);
      r.dist_a = std::stod(f[2]);
      r.dist_as = std::stod(f[3]);
      r.dist_a0 = std::stod(f[4]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::IoError, "malformed number in '" + path + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hyetc::metrics
