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

// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include "hyetc/attitude.hpp"
#include "hyetc/hybrid.hpp"
#include "hyetc/linear.hpp"
#include "hyetc/metrics.hpp"
#include "hyetc/runner.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace hyetc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kData = HYETC_DATA_DIR;

int g_failed = 0;

void verdict(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

template <typename... T>
std::string fmt(const char* f, T... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(hw, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct Timed {
  runner::Simulation sim;
  double seconds = 0.0;
  std::string error;
};

Timed timed_simulate(const runner::RunSpec& s) {
  Timed out;
  const auto t0 = Clock::now();
  try {
    out.sim = runner::simulate(s);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

runner::RunSpec make_spec(const std::string& scenario, Variant v, std::uint64_t seed, double rho = 0.0) {
  runner::RunSpec s;
  s.scenario = scenario;
  s.variant = v;
  s.seed = seed;
  s.rho = rho;
  s.horizon = 100.0;
  return s;
}

hybrid::HybridSystemDef lti(const Mat& A) {
  hybrid::HybridSystemDef s;
  s.dim = A.rows();
  s.flow = [A](const VecRef& x) -> Vec { return A * x; };
  s.flow_margin = [](const VecRef&) { return 1.0; };
  return s;
}

hybrid::HybridSystemDef timer(double period) {
  hybrid::HybridSystemDef s;
  s.dim = 1;
  s.flow = [](const VecRef&) -> Vec { return Vec::Ones(1); };
  s.flow_margin = [period](const VecRef& x) { return period - x[0]; };
  s.jumps.push_back({"tick", [period](const VecRef& x) { return x[0] - period; },
                     [](const VecRef&) -> Vec { return Vec::Zero(1); }});
  return s;
}

// ---------------------------------------------------------------------------

void solver_oracle() {
  double worst = 0.0, slowest = 0.0;
  std::vector<Mat> systems;
  Mat A(3, 3);
  A << 0, 1, 0, -1, 0, 0, 0, 0, -0.1;
  systems.push_back(A);
  Mat B(4, 4);
  B << -0.5, 2, 0, 0, -2, -0.5, 0, 0, 0, 0, 0, 1, 0, 0, -4, -0.2;
  systems.push_back(B);
  for (const Mat& M : systems) {
    Vec x0 = Vec::LinSpaced(M.rows(), 1.0, -1.0);
    hybrid::SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.max_t = 100.0;
    const auto t0 = Clock::now();
    const auto rec = hybrid::solve(lti(M), x0, cfg);
    slowest = std::max(slowest, std::chrono::duration<double>(Clock::now() - t0).count());
    for (const auto& s : rec.samples) worst = std::max(worst, (s.state - (M * s.time.t).exp() * x0).norm());
  }
  double jump_err = 0.0;
  std::size_t n_events = 0;
  for (double period : {0.7, 5.0}) {
    hybrid::SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.max_t = 100.0;
    const auto t0 = Clock::now();
    const auto rec = hybrid::solve(timer(period), Vec::Zero(1), cfg);
    slowest = std::max(slowest, std::chrono::duration<double>(Clock::now() - t0).count());
    for (std::size_t k = 0; k < rec.events.size(); ++k) {
      jump_err = std::max(jump_err, std::abs(rec.events[k].time.t - period * double(k + 1)));
    }
    n_events += rec.events.size();
  }
  const bool ok = worst <= 1e-6 && jump_err <= 1e-10 && slowest < 5.0 && n_events == 142 + 20;
  verdict("solver-oracle", ok,
          fmt("max LTI error %.3g, max jump time error %.3g over %zu events, slowest run %.2f s", worst,
              jump_err, n_events, slowest));
}

void observer_exactness() {
  const std::string di = kData + "/double_integrator.json";
  const auto cfg = linear::load_linear_config(di);
  const linear::Index I{cfg.nx(), cfg.nu()};
  auto est_error = [&](const Vec& xi) { return (xi.segment(I.z1(), I.nx) - xi.segment(I.x(), I.nx)).norm(); };

  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> ours_worst(seeds.size()), a_worst(seeds.size());
  std::vector<std::string> errors(seeds.size() * 2);
  parallel_for(seeds.size() * 2, [&](std::size_t i) {
    auto s = make_spec("linear", i % 2 ? Variant::A : Variant::Ours, seeds[i / 2]);
    s.config_path = di;
    const auto r = timed_simulate(s);
    if (!r.error.empty()) {
      errors[i] = r.error;
      return;
    }
    double w = 0.0;
    for (const auto& smp : r.sim.record.samples) {
      if (smp.time.t >= 2.0 * cfg.d_obs) w = std::max(w, est_error(smp.state));
    }
    (i % 2 ? a_worst : ours_worst)[i / 2] = w;
  });
  for (const auto& e : errors) {
    if (!e.empty()) return verdict("observer-exactness", false, e);
  }

  // scalar closed form: x = 1, gains 1 and 2, d = 1, both observers from 0
  const Mat F1 = Mat::Constant(1, 1, -1.0), F2 = Mat::Constant(1, 1, -2.0);
  const auto fm = linear::fusion_matrices(F1, F2, 1.0);
  Vec z1(1), z2(1);
  z1 << 1.0 - std::exp(-1.0);
  z2 << 1.0 - std::exp(-2.0);
  const double scalar = linear::fuse_finite_time(fm, z1, z2, Vec::Zero(1))[0];

  const double ours_max = *std::max_element(ours_worst.begin(), ours_worst.end());
  const double a_min = *std::min_element(a_worst.begin(), a_worst.end());
  const bool ok = ours_max <= 1e-6 && std::abs(scalar - 1.0) <= 1e-12 && a_min > 1e-6;
  verdict("observer-exactness", ok,
          fmt("ours max error after 2d %.3g over %zu seeds; scalar estimate %.15g; variant a smallest worst-case %.3g",
              ours_max, seeds.size(), scalar, a_min));
}

void attitude_unperturbed() {
  const attitude::AttitudeConfig cfg;
  std::vector<Timed> runs(20);
  parallel_for(runs.size(), [&](std::size_t i) { runs[i] = timed_simulate(make_spec("attitude", Variant::Ours, i + 1)); });
  int bad = 0;
  std::string why;
  double slowest = 0.0, worst_final = 0.0, latest_tstar = 0.0;
  int worst_census = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    auto fail = [&](const std::string& m) {
      ++bad;
      if (why.empty()) why = fmt("seed %zu: ", i + 1) + m;
    };
    slowest = std::max(slowest, r.seconds);
    if (!r.error.empty()) {
      fail(r.error);
      continue;
    }
    const auto& rep = r.sim.report;
    const auto& rec = r.sim.record;
    if (rec.termination != hybrid::Termination::Horizon) fail("terminated early");
    if (!rep.t_star || *rep.t_star >= 100.0) {
      fail("dist_As never settled");
      continue;
    }
    latest_tstar = std::max(latest_tstar, *rep.t_star);
    const double final_a = rep.dist_series.back().dist_a;
    worst_final = std::max(worst_final, final_a);
    if (final_a > 1e-4) fail(fmt("dist_A(100) = %.3g", final_a));
    double prev_wd = -1.0;
    for (const auto& e : rec.events) {
      if (e.time.t < *rep.t_star) continue;
      if (e.branch != attitude::kWatchdog && e.branch != attitude::kControllerSwitch) {
        fail("event " + e.branch + fmt(" at t=%.6g after t*", e.time.t));
        break;
      }
      if (e.branch == attitude::kWatchdog) {
        if (prev_wd >= 0.0 && std::abs(e.time.t - prev_wd - cfg.tau_bar) > 1e-6) {
          fail(fmt("watchdog spacing %.9g", e.time.t - prev_wd));
        }
        prev_wd = e.time.t;
      }
    }
    worst_census = std::max(worst_census, rep.max_consecutive_jumps);
    if (rep.max_consecutive_jumps > 2) fail(fmt("census %d", rep.max_consecutive_jumps));
    if (r.seconds >= 30.0) fail(fmt("runtime %.1f s", r.seconds));
  }
  verdict("attitude-unperturbed", bad == 0,
          fmt("%d/20 seeds failing; latest t* %.3g s; worst dist_A(100) %.3g; census %d; slowest run %.2f s",
              bad, latest_tstar, worst_final, worst_census, slowest) +
              (why.empty() ? "" : "; first: " + why));
}

void attitude_perturbed() {
  std::vector<Timed> runs(10);
  parallel_for(runs.size(), [&](std::size_t i) {
    runs[i] = timed_simulate(make_spec("attitude", Variant::Ours, i + 1, 1e-3));
  });
  int bad = 0;
  double worst_tail = 0.0, worst_all = 0.0, min_gap = INFINITY;
  std::string why;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    auto fail = [&](const std::string& m) {
      ++bad;
      if (why.empty()) why = fmt("seed %zu: ", i + 1) + m;
    };
    if (!r.error.empty()) {
      fail(r.error);
      continue;
    }
    if (r.sim.record.termination != hybrid::Termination::Horizon) fail("terminated early");
    double tail = 0.0, all = 0.0;
    for (const auto& d : r.sim.report.dist_series) {
      all = std::max(all, d.dist_a);
      if (d.t >= 80.0) tail = std::max(tail, d.dist_a);
    }
    worst_tail = std::max(worst_tail, tail);
    worst_all = std::max(worst_all, all);
    if (!std::isfinite(all)) fail("unbounded");
    if (tail > 0.1) fail(fmt("tail dist_A %.3g", tail));
    for (double g : r.sim.report.inter_tx) min_gap = std::min(min_gap, g);
    if (!r.sim.report.inter_tx.empty() &&
        *std::min_element(r.sim.report.inter_tx.begin(), r.sim.report.inter_tx.end()) < 1e-3) {
      fail("inter-transmission time below 1e-3");
    }
  }
  verdict("attitude-perturbed", bad == 0,
          fmt("%d/10 seeds failing; max dist_A %.3g; max over final 20%% %.3g; min inter-tx %.3g s", bad,
              worst_all, worst_tail, min_gap) +
              (why.empty() ? "" : "; first: " + why));
}

struct Comparison {
  std::string scenario;
  double rho;
  std::uint64_t seed;
  std::map<Variant, int> tx;
  std::map<Variant, Timed> runs;
};

std::vector<Comparison> g_comparisons;  // reused by the certificate check

void transmission_comparison() {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  for (const char* sc : {"linear", "attitude"}) {
    for (double rho : {0.0, 1e-3}) {
      for (auto seed : seeds) g_comparisons.push_back({sc, rho, seed, {}, {}});
    }
  }
  std::mutex mu;
  // ours, a, c first; b needs the ours period
  const Variant first[] = {Variant::Ours, Variant::A, Variant::C};
  parallel_for(g_comparisons.size() * 3, [&](std::size_t i) {
    auto& c = g_comparisons[i / 3];
    auto r = timed_simulate(make_spec(c.scenario, first[i % 3], c.seed, c.rho));
    std::lock_guard lock(mu);
    c.runs[first[i % 3]] = std::move(r);
  });
  parallel_for(g_comparisons.size(), [&](std::size_t i) {
    auto& c = g_comparisons[i];
    const auto& ours = c.runs[Variant::Ours];
    Timed r;
    if (!ours.error.empty() || !std::isfinite(ours.sim.report.liminf_inter_tx)) {
      r.error = "no period available from the ours run";
    } else {
      auto s = make_spec(c.scenario, Variant::B, c.seed, c.rho);
      s.period_b = ours.sim.report.liminf_inter_tx;
      r = timed_simulate(s);
    }
    std::lock_guard lock(mu);
    c.runs[Variant::B] = std::move(r);
  });

  int violations = 0;
  std::string why;
  std::ostringstream table;
  std::map<std::string, std::map<Variant, long>> totals;
  for (auto& c : g_comparisons) {
    const std::string key = c.scenario + fmt("/rho=%g", c.rho);
    for (auto& [v, r] : c.runs) {
      if (!r.error.empty()) {
        ++violations;
        if (why.empty()) why = key + " " + to_string(v) + ": " + r.error;
        c.tx[v] = -1;
        continue;
      }
      c.tx[v] = static_cast<int>(r.sim.report.transmissions.size());
      totals[key][v] += c.tx[v];
    }
    for (Variant v : {Variant::A, Variant::B, Variant::C}) {
      if (c.tx[v] >= 0 && c.tx[Variant::Ours] > c.tx[v]) {
        ++violations;
        if (why.empty()) {
          why = key + fmt(" seed %llu: ours %d > ", static_cast<unsigned long long>(c.seed), c.tx[Variant::Ours]) +
                to_string(v) + fmt(" %d", c.tx[v]);
        }
      }
    }
  }
  for (const auto& [key, t] : totals) {
    table << " " << key << " ours/a/b/c=" << t.at(Variant::Ours) << "/" << t.at(Variant::A) << "/"
          << (t.count(Variant::B) ? t.at(Variant::B) : -1) << "/" << t.at(Variant::C) << ";";
  }
  verdict("transmission-comparison", violations == 0,
          fmt("%d violations over %zu matched runs; totals", violations, g_comparisons.size()) + table.str() +
              (why.empty() ? "" : " first: " + why));
}

void pflow_certificates() {
  int bad = 0, replays = 0;
  int max_n_lin = 0, max_n_att = 0, census_att = 0;
  std::string why;
  for (const auto& c : g_comparisons) {
    for (const auto& [v, r] : c.runs) {
      if (!r.error.empty()) continue;
      const auto& rep = r.sim.report;
      ++replays;
      std::vector<hybrid::HybridTime> times;
      for (const auto& s : r.sim.record.samples) times.push_back(s.time);
      for (const auto& e : r.sim.record.events) times.push_back(e.time);
      const bool replay = rep.pflow.replay_ok && metrics::pflow_holds(times, rep.pflow);
      auto fail = [&](const std::string& m) {
        ++bad;
        if (why.empty()) why = c.scenario + " " + to_string(v) + fmt(" seed %llu: ", static_cast<unsigned long long>(c.seed)) + m;
      };
      if (!replay) fail("replay failed");
      if (v != Variant::Ours) continue;
      if (c.scenario == "linear") {
        max_n_lin = std::max(max_n_lin, rep.pflow.n);
        if (rep.pflow.n > 4) fail(fmt("N=%d", rep.pflow.n));
      } else {
        max_n_att = std::max(max_n_att, rep.pflow.n);
        census_att = std::max(census_att, rep.max_consecutive_jumps);
        if (rep.pflow.n > 4) fail(fmt("N=%d", rep.pflow.n));
        if (rep.max_consecutive_jumps > 2) fail(fmt("census %d", rep.max_consecutive_jumps));
      }
    }
  }
  verdict("persistent-flow", bad == 0 && replays > 0,
          fmt("linear max N %d; attitude max N %d with census %d; %d replays", max_n_lin, max_n_att, census_att,
              replays) +
              (why.empty() ? "" : "; first: " + why));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / "hyetc_acceptance_det";
  fs::remove_all(root);
  bool ok = true;
  std::string detail;
  for (const char* sc : {"linear", "attitude"}) {
    for (double rho : {0.0, 1e-3}) {
      std::string traces[2];
      for (int k = 0; k < 2; ++k) {
        auto s = make_spec(sc, Variant::Ours, 11, rho);
        s.out_root = (root / std::to_string(k)).string();
        const auto o = runner::run_scenario(s);
        if (o.exit_code != 0) ok = false;
        traces[k] = slurp(fs::path(o.out_dir) / "trace.csv");
      }
      const bool same = !traces[0].empty() && traces[0] == traces[1];
      ok = ok && same;
      detail += fmt("%s/rho=%g %s (%zu bytes); ", sc, rho, same ? "identical" : "DIFFERENT", traces[0].size());
    }
  }
  fs::remove_all(root);
  verdict("determinism", ok, detail);
}

// last sample at each flow time
std::map<double, Vec> by_time(const hybrid::RunRecord& rec) {
  std::map<double, Vec> m;
  for (const auto& s : rec.samples) m[s.time.t] = s.state;
  return m;
}

void nominal_equivalence() {
  double worst_att = 0.0, worst_lin = 0.0;
  int shared_att = 0, shared_lin = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const attitude::AttitudeConfig cfg;
    const auto sc = attitude::build_attitude_scenario(cfg);
    const Vec xi0 = attitude::initial_state(seed, InitMode::ExactSensor);
    hybrid::SolverConfig sv;
    sv.dt = cfg.dt;
    sv.max_t = 50.0;
    sv.record_every = 100;
    const auto full = by_time(hybrid::solve(sc.system, xi0, sv));
    const auto nom = by_time(hybrid::solve(attitude::build_nominal(cfg), xi0.head<8>(), sv));
    for (const auto& [t, x] : full) {
      auto it = nom.find(t);
      if (it == nom.end()) continue;
      worst_att = std::max(worst_att, (x.head<8>() - it->second).norm());
      ++shared_att;
    }
  }
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto cfg = linear::batch_reactor_config();
    const linear::Index I{cfg.nx(), cfg.nu()};
    const auto sc = linear::build_linear_scenario(cfg);
    const Vec xi0 = linear::initial_state(cfg, seed, InitMode::ExactSensor);
    hybrid::SolverConfig sv;
    sv.dt = cfg.dt;
    sv.max_t = 50.0;
    const auto full = by_time(hybrid::solve(sc.system, xi0, sv));
    const auto nom = by_time(hybrid::solve(linear::build_nominal(cfg), xi0.head(I.nx + I.nu + 1), sv));
    for (const auto& [t, x] : full) {
      auto it = nom.find(t);
      if (it == nom.end()) continue;
      worst_lin = std::max(worst_lin, (x.head(I.nx + I.nu) - it->second.head(I.nx + I.nu)).norm());
      ++shared_lin;
    }
  }
  const bool ok = worst_att <= 1e-6 && worst_lin <= 1e-6 && shared_att > 1000 && shared_lin > 1000;
  verdict("nominal-equivalence", ok,
          fmt("attitude max (x, x_c) gap %.3g at %d shared times; linear %.3g at %d", worst_att, shared_att,
              worst_lin, shared_lin));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  solver_oracle();
  observer_exactness();
  attitude_unperturbed();
  attitude_perturbed();
  transmission_comparison();
  pflow_certificates();
  determinism();
  nominal_equivalence();
  std::printf("%d criteria failed; %.1f s total\n", g_failed,
              std::chrono::duration<double>(Clock::now() - t0).count());
  return g_failed == 0 ? 0 : 1;
}
