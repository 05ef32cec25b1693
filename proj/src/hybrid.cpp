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

#include "hyetc/hybrid.hpp"

#include <cmath>
#include <limits>

namespace hyetc::hybrid {

namespace {

Vec eval_flow(const HybridSystemDef& sys, const VecRef& xi) {
  Vec d = sys.flow(xi);
  if (d.size() != xi.size()) {
    throw Error(ErrorCode::DimensionMismatch, "flow returned a vector of the wrong size");
  }
  if (!d.allFinite()) throw Error(ErrorCode::NumericalFailure, "flow field is not finite");
  return d;
}

// Start of the grid cell containing t; grid points are k * dt.
double next_grid_point(double t, double dt) {
  const double r = t / dt;
  const double k = std::round(r);
  const double base = std::abs(r - k) < 1e-6 ? k : std::floor(r);
  return (base + 1.0) * dt;
}

}  // namespace

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::JumpBudget: return "jumpBudget";
    case Termination::ZenoGuard: return "zenoGuard";
    case Termination::LeftCandD: return "leftCandD";
    case Termination::NumericalFailure: return "numericalFailure";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorCode::ConfigError, "dt must be positive");
  if (!(event_tol > 0.0)) throw Error(ErrorCode::ConfigError, "event_tol must be positive");
  if (max_consecutive_jumps < 1) {
    throw Error(ErrorCode::ConfigError, "max_consecutive_jumps must be at least 1");
  }
  if (!(max_t >= 0.0)) throw Error(ErrorCode::ConfigError, "max_t must be nonnegative");
  if (max_j < 0) throw Error(ErrorCode::ConfigError, "max_j must be nonnegative");
  if (record_every < 1) throw Error(ErrorCode::ConfigError, "record_every must be at least 1");
}

Vec integrate_flow_step(const HybridSystemDef& sys, const VecRef& xi, double h) {
  const Vec k1 = eval_flow(sys, xi);
  const Vec k2 = eval_flow(sys, xi + 0.5 * h * k1);
  const Vec k3 = eval_flow(sys, xi + 0.5 * h * k2);
  const Vec k4 = eval_flow(sys, xi + h * k3);
  Vec out = xi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (sys.projector) out = sys.projector(out);
  if (!out.allFinite()) throw Error(ErrorCode::NumericalFailure, "state left the finite range");
  return out;
}

double locate_guard_crossing(const std::function<double(double)>& g, double t_lo, double t_hi,
                             double event_tol) {
  double g_lo = g(t_lo);
  double g_hi = g(t_hi);
  // Orient the bracket so that `in` is the nonnegative end.
  double in = t_hi, out = t_lo, g_in = g_hi;
  if (g_lo >= 0.0 && g_hi < 0.0) {
    in = t_lo;
    out = t_hi;
    g_in = g_lo;
  } else if (!(g_lo < 0.0 && g_hi >= 0.0)) {
    throw Error(ErrorCode::NoCrossing, "guard does not change sign on the bracket");
  }
  // Interpolated probes first, nudged a little into the jump set: a tiny nudge,
  // then half a tolerance. Timer guards are linear in t and land on the first
  // one, so repeated resets do not drift. Otherwise the bracket just shrinks.
  if (g_in > event_tol) {
    const double g_out = (out == t_lo) ? g_lo : g_hi;
    const double slope = (g_in - g_out) / (in - out);
    const double root = out + (0.0 - g_out) / slope;
    for (double nudge : {1e-3 * event_tol, 0.5 * event_tol}) {
      const double guess = root + nudge / slope;
      if (!std::isfinite(guess) || !((guess - in) * (guess - out) < 0.0)) break;
      const double g_guess = g(guess);
      if (g_guess >= 0.0) {
        in = guess;
        g_in = g_guess;
        break;
      }
      out = guess;
    }
  }
  for (int it = 0; it < 200 && g_in > event_tol; ++it) {
    const double mid = 0.5 * (in + out);
    if (mid == in || mid == out) break;
    const double g_mid = g(mid);
    if (g_mid >= 0.0) {
      in = mid;
      g_in = g_mid;
    } else {
      out = mid;
    }
  }
  return in;
}

std::optional<std::size_t> active_branch(const HybridSystemDef& sys, const VecRef& xi) {
  for (std::size_t i = 0; i < sys.jumps.size(); ++i) {
    if (sys.jumps[i].guard(xi) >= 0.0) return i;
  }
  return std::nullopt;
}

StepOutcome step(const HybridSystemDef& sys, const VecRef& xi, HybridTime now,
                 const SolverConfig& cfg) {
  const double tol = cfg.event_tol;
  const auto active = active_branch(sys, xi);
  const double margin = sys.flow_margin(xi);
  const bool in_c = margin >= -tol;

  if (active && (cfg.priority == Priority::JumpFirst || !in_c)) {
    return {sys.jumps[*active].map(xi), 0.0, active};
  }
  if (!in_c) {
    throw Error(ErrorCode::LeftCandD, "state is outside both the flow set and the jump set");
  }

  const double t_end = std::min(next_grid_point(now.t, cfg.dt), cfg.max_t);
  const double h = t_end - now.t;
  if (!(h > 0.0)) throw Error(ErrorCode::NumericalFailure, "no flow time left in the step");

  Vec end = integrate_flow_step(sys, xi, h);
  double stop = h;
  bool truncated = false;
  auto along = [&](auto&& fn) {
    return [&, fn](double s) { return s == 0.0 ? fn(Vec(xi)) : fn(integrate_flow_step(sys, xi, s)); };
  };

  if (cfg.priority == Priority::JumpFirst) {
    for (const auto& b : sys.jumps) {
      if (b.guard(end) < 0.0) continue;
      // inactive at the start (else we would have jumped), active at the end
      const auto g = along([&](const Vec& v) { return b.guard(v); });
      const double s = locate_guard_crossing(g, 0.0, h, tol);
      if (s < stop) {
        stop = s;
        truncated = true;
      }
    }
  }
  if (sys.flow_margin(end) <= -2.0 * tol) {
    // Leaving C: stop just outside so the next call sees a state with
    // margin < -tol and either jumps or reports LeftCandD.
    const auto g = along([&](const Vec& v) { return -sys.flow_margin(v) - 2.0 * tol; });
    const double s = locate_guard_crossing(g, 0.0, h, tol);
    if (s < stop) {
      stop = s;
      truncated = true;
    }
  }
  if (truncated) {
    if (stop <= 0.0) {
      throw Error(ErrorCode::LeftCandD, "flow cannot continue inside the flow set");
    }
    end = integrate_flow_step(sys, xi, stop);
  }
  return {std::move(end), stop, std::nullopt};
}

RunRecord solve(const HybridSystemDef& sys, const VecRef& xi0, const SolverConfig& cfg) {
  cfg.validate();
  if (xi0.size() != sys.dim) {
    throw Error(ErrorCode::DimensionMismatch, "initial state has the wrong dimension");
  }

  RunRecord rec;
  HybridTime now{0.0, 0};
  Vec xi = xi0;
  rec.samples.push_back({now, xi});
  int same_instant = 0;

  bool pending = false;  // latest flow state not yet recorded
  auto finish = [&](Termination why, std::string msg) {
    if (pending) rec.samples.push_back({now, xi});
    rec.termination = why;
    rec.diagnostic = std::move(msg);
    return std::move(rec);
  };

  while (true) {
    if (now.t >= cfg.max_t) {
      // Only jumps remain possible at the horizon.
      const auto active = active_branch(sys, xi);
      const bool wants_jump =
          active && (cfg.priority == Priority::JumpFirst || sys.flow_margin(xi) < -cfg.event_tol);
      if (!wants_jump) return finish(Termination::Horizon, "");
    }

    StepOutcome out;
    try {
      out = step(sys, xi, now, cfg);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::LeftCandD: return finish(Termination::LeftCandD, e.what());
        default: return finish(Termination::NumericalFailure, e.what());
      }
    }

    if (out.branch) {
      if (same_instant + 1 > cfg.max_consecutive_jumps) {
        return finish(Termination::ZenoGuard,
                      "more than " + std::to_string(cfg.max_consecutive_jumps) +
                          " consecutive jumps at t=" + std::to_string(now.t));
      }
      ++same_instant;
      ++now.j;
      const auto& branch = sys.jumps[*out.branch];
      if (out.state.size() != sys.dim) {
        return finish(Termination::NumericalFailure, "jump map '" + branch.id + "' changed the dimension");
      }
      if (cfg.record_jump_states) {
        if (pending) {
          rec.samples.push_back({{now.t, now.j - 1}, xi});
          pending = false;
        }
        rec.events.push_back({now, branch.id, xi, out.state});
        xi = std::move(out.state);
        rec.samples.push_back({now, xi});
      } else {
        rec.events.push_back({now, branch.id, Vec(), Vec()});
        xi = std::move(out.state);
        pending = true;
      }
      if (now.j >= cfg.max_j) return finish(Termination::JumpBudget, "");
    } else {
      same_instant = 0;
      const double grid = std::min(next_grid_point(now.t, cfg.dt), cfg.max_t);
      // full steps land exactly on the grid
      const bool on_grid = out.elapsed == grid - now.t;
      now.t = on_grid ? grid : now.t + out.elapsed;
      xi = std::move(out.state);
      const bool keep = cfg.record_every == 1 ||
                        (on_grid && std::llround(now.t / cfg.dt) % cfg.record_every == 0);
      if (keep) {
        rec.samples.push_back({now, xi});
        pending = false;
      } else {
        pending = true;
      }
    }
  }
}

}  // namespace hyetc::hybrid
