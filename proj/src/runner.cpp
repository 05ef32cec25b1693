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

#include "hyetc/runner.hpp"

#include "hyetc/attitude.hpp"
#include "hyetc/linear.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace hyetc::runner {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Perturbed systems carry one extra clock coordinate, starting at 0.
Vec fit_dim(const Vec& x0, int dim) {
  if (x0.size() == dim) return x0;
  Vec out = Vec::Zero(dim);
  out.head(x0.size()) = x0;
  return out;
}

std::string run_dir(const RunSpec& spec) {
  const std::string root = spec.out_root.empty() ? default_out_root() : spec.out_root;
  return (fs::path(root) / spec.scenario / to_string(spec.variant)).string();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

json summary_json(const RunSpec& spec, const Simulation& sim) {
  const auto& r = sim.report;
  json j;
  j["scenario"] = spec.scenario;
  j["variant"] = to_string(spec.variant);
  j["seed"] = spec.seed;
  j["horizon"] = spec.horizon;
  j["perturb_rho"] = spec.rho;
  j["dt"] = sim.dt;
  j["termination"] = hybrid::to_string(sim.record.termination);
  j["diagnostic"] = sim.record.diagnostic;
  j["t_star"] = r.t_star ? json(*r.t_star) : json(nullptr);
  j["liminf_inter_tx"] = number_or_null(r.liminf_inter_tx);
  j["liminf_window"] = {r.liminf_window_start, spec.horizon};
  j["total_transmissions"] = r.transmissions.size();
  j["min_inter_tx"] =
      r.inter_tx.empty() ? json(nullptr) : json(*std::min_element(r.inter_tx.begin(), r.inter_tx.end()));
  j["jump_census"] = r.jump_census;
  j["max_consecutive_jumps"] = r.max_consecutive_jumps;
  j["pflow"] = {{"tau", r.pflow.tau}, {"N", r.pflow.n}, {"replay_ok", r.pflow.replay_ok}};
  j["zeno"] = r.zeno;
  j["final_dist_A"] = r.dist_series.empty() ? json(nullptr) : json(r.dist_series.back().dist_a);
  j["samples"] = sim.record.samples.size();
  j["events"] = sim.record.events.size();
  j["period_b"] = spec.variant == Variant::B ? json(sim.period_b) : json(nullptr);
  return j;
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::SingularFusion:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DomainError:
      return kConfigError;
    case ErrorCode::MissingDependency:
      return kMissingDependency;
    case ErrorCode::ZenoGuard:
    case ErrorCode::NumericalFailure:
    case ErrorCode::LeftCandD:
    case ErrorCode::NoCrossing:
      return kAborted;
    case ErrorCode::IoError:
      break;
  }
  return kFailure;
}

}  // namespace

void RunSpec::validate() const {
  if (scenario != "linear" && scenario != "attitude") {
    throw Error(ErrorCode::ConfigError, "scenario must be 'linear' or 'attitude', got '" + scenario + "'");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(ErrorCode::ConfigError, "horizon must be positive");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::ConfigError, "perturbation must be nonnegative");
  if (!(record_interval > 0.0)) throw Error(ErrorCode::ConfigError, "record interval must be positive");
  if (period_b && !(*period_b > 0.0)) throw Error(ErrorCode::ConfigError, "period_b must be positive");
}

std::string default_out_root() {
  const char* env = std::getenv("HYETC_OUT");
  return (env != nullptr && *env != '\0') ? env : "out";
}

Simulation simulate(const RunSpec& spec) {
  spec.validate();
  if (spec.variant == Variant::B && !spec.period_b) {
    throw Error(ErrorCode::MissingDependency, "variant b needs a period");
  }
  const InitMode mode = spec.exact_sensor ? InitMode::ExactSensor : InitMode::Default;

  Simulation sim;
  Vec x0;
  if (spec.scenario == "attitude") {
    attitude::AttitudeConfig cfg =
        spec.config_path.empty() ? attitude::AttitudeConfig{} : attitude::load_attitude_config(spec.config_path);
    cfg.rho = spec.rho;
    sim.scenario = attitude::make_attitude_comparison_variant(spec.variant, cfg, spec.period_b);
    x0 = attitude::initial_state(spec.seed, mode);
  } else {
    linear::LinearConfig cfg =
        spec.config_path.empty() ? linear::batch_reactor_config() : linear::load_linear_config(spec.config_path);
    cfg.rho = spec.rho;
    cfg.validate();
    sim.scenario = linear::make_linear_comparison_variant(spec.variant, cfg, spec.period_b);
    x0 = linear::initial_state(cfg, spec.seed, mode);
  }
  sim.dt = sim.scenario.dt;
  if (spec.period_b) sim.period_b = *spec.period_b;

  hybrid::SolverConfig sc;
  sc.dt = sim.dt;
  sc.max_t = spec.horizon;
  sc.record_every = std::max(1, static_cast<int>(std::lround(spec.record_interval / sim.dt)));
  // variant c jumps every few steps; storing each jump would dwarf the trace
  sc.record_jump_states = spec.variant != Variant::C;
  sim.record = hybrid::solve(sim.scenario.system, fit_dim(x0, sim.scenario.system.dim), sc);

  metrics::AnalyzeOptions opt;
  opt.horizon = spec.horizon;
  opt.max_consecutive_jumps = sc.max_consecutive_jumps;
  sim.report = metrics::analyze(sim.record, sim.scenario.sets, sim.scenario.transmission_branches, opt);
  return sim;
}

double period_from_ours(const std::string& out_root, const std::string& scenario) {
  const fs::path path = fs::path(out_root) / scenario / "ours" / "summary.json";
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingDependency,
                "variant b needs a prior ours run: '" + path.string() + "' not found");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MissingDependency, "unreadable '" + path.string() + "': " + e.what());
  }
  if (!j.contains("liminf_inter_tx") || !j["liminf_inter_tx"].is_number()) {
    throw Error(ErrorCode::MissingDependency, "'" + path.string() + "' has no finite liminf_inter_tx");
  }
  const double p = j["liminf_inter_tx"].get<double>();
  if (!(p > 0.0)) throw Error(ErrorCode::MissingDependency, "'" + path.string() + "' has liminf_inter_tx <= 0");
  return p;
}

RunOutcome run_scenario(const RunSpec& spec_in) {
  RunOutcome out;
  RunSpec spec = spec_in;
  if (spec.out_root.empty()) spec.out_root = default_out_root();
  try {
    spec.validate();
    out.out_dir = run_dir(spec);
    if (spec.variant == Variant::B && !spec.period_b) spec.period_b = period_from_ours(spec.out_root, spec.scenario);

    const Simulation sim = simulate(spec);
    metrics::export_csv(sim.report, sim.record, sim.scenario.transmission_branches, out.out_dir);
    write_text(fs::path(out.out_dir) / "summary.json", summary_json(spec, sim).dump(2) + "\n");

    const auto& r = sim.report;
    out.termination = hybrid::to_string(sim.record.termination);
    out.total_transmissions = static_cast<int>(r.transmissions.size());
    out.t_star = r.t_star;
    out.liminf_inter_tx = r.liminf_inter_tx;
    out.pflow_n = r.pflow.n;
    out.pflow_tau = r.pflow.tau;
    out.max_consecutive_jumps = r.max_consecutive_jumps;
    if (sim.record.termination == hybrid::Termination::Horizon) {
      out.exit_code = kOk;
      out.message = "ok";
    } else {
      out.exit_code = kAborted;
      out.message = std::string("run aborted: ") + out.termination +
                    (sim.record.diagnostic.empty() ? "" : " (" + sim.record.diagnostic + ")");
    }
  } catch (const Error& e) {
    out.exit_code = exit_for(e.code());
    out.message = e.what();
  } catch (const std::exception& e) {
    out.exit_code = kFailure;
    out.message = e.what();
  }
  return out;
}

namespace {

RunSpec spec_from_json(const json& j, const fs::path& base_dir, const std::string& suite_root) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "suite run must be an object");
  RunSpec s;
  s.out_root = suite_root;
  try {
    if (j.contains("scenario")) s.scenario = j.at("scenario").get<std::string>();
    if (j.contains("variant")) s.variant = parse_variant(j.at("variant").get<std::string>());
    if (j.contains("perturb")) s.rho = j.at("perturb").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("horizon")) s.horizon = j.at("horizon").get<double>();
    if (j.contains("exact_init")) s.exact_sensor = j.at("exact_init").get<bool>();
    if (j.contains("period_b")) s.period_b = j.at("period_b").get<double>();
    if (j.contains("out")) {
      const fs::path p = j.at("out").get<std::string>();
      s.out_root = (p.is_relative() ? base_dir / p : p).string();
    }
    if (j.contains("config")) {
      const fs::path p = j.at("config").get<std::string>();
      s.config_path = (p.is_relative() ? base_dir / p : p).string();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("suite run: ") + e.what());
  }
  return s;
}

}  // namespace

int run_suite(const std::string& suite_path, std::vector<SuiteEntry>* entries_out) {
  std::ifstream in(suite_path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open suite '" + suite_path + "'");
  json suite;
  try {
    in >> suite;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed suite: ") + e.what());
  }
  if (!suite.is_object() || !suite.contains("runs") || !suite["runs"].is_array()) {
    throw Error(ErrorCode::ConfigError, "suite must be an object with a 'runs' array");
  }
  const fs::path base_dir = fs::absolute(suite_path).parent_path();
  std::string root = default_out_root();
  if (suite.contains("out") && suite["out"].is_string()) {
    const fs::path p = suite["out"].get<std::string>();
    root = (p.is_relative() ? base_dir / p : p).string();
  }

  std::vector<SuiteEntry> entries(suite["runs"].size());
  std::vector<std::size_t> first, second;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      entries[i].spec = spec_from_json(suite["runs"][i], base_dir, root);
      entries[i].spec.validate();
      (entries[i].spec.variant == Variant::B ? second : first).push_back(i);
    } catch (const Error& e) {
      entries[i].outcome.exit_code = exit_for(e.code());
      entries[i].outcome.message = e.what();
    }
  }

  // b reads the ours summaries, so it waits for the first wave
  const auto wave = [&](const std::vector<std::size_t>& idx) {
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min<std::size_t>(hw, idx.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < idx.size(); k = next++) {
          auto& e = entries[idx[k]];
          e.outcome = run_scenario(e.spec);
        }
      });
    }
    for (auto& t : pool) t.join();
  };
  wave(first);
  wave(second);

  int worst = kOk;
  json index = json::array();
  for (const auto& e : entries) {
    worst = std::max(worst, e.outcome.exit_code);
    index.push_back({{"scenario", e.spec.scenario},
                     {"variant", to_string(e.spec.variant)},
                     {"seed", e.spec.seed},
                     {"perturb_rho", e.spec.rho},
                     {"status", e.outcome.exit_code == kOk ? "ok" : "failed"},
                     {"exit_code", e.outcome.exit_code},
                     {"out_dir", e.outcome.out_dir},
                     {"message", e.outcome.message}});
  }
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + root + "': " + ec.message());
  write_text(fs::path(root) / "index.json", json{{"runs", index}}.dump(2) + "\n");
  if (entries_out != nullptr) *entries_out = std::move(entries);
  return worst;
}

}  // namespace hyetc::runner
