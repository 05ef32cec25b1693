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
 * @file hybrid.hpp
 * @brief Fixed-step simulator for hybrid systems H = (C, F, D, G).
 *
 * The flow set C is {flow_margin >= 0}; the jump set D is the union of the
 * branch regions {guard >= 0}. Flow is integrated with classical RK4 on a
 * fixed grid t_k = k dt. A step that carries the state into a jump set is
 * truncated at the crossing, located by bisection on the guard evaluated
 * along the step (each probe re-integrates from the step start with a
 * shorter step). Jumps are taken one per call, highest-priority branch first.
 */

#pragma once

#include "hyetc/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hyetc::hybrid {

struct HybridTime {
  double t = 0.0;
  int j = 0;

  friend bool operator==(const HybridTime&, const HybridTime&) = default;
};

using FlowFn = std::function<Vec(const VecRef&)>;
using MarginFn = std::function<double(const VecRef&)>;
using MapFn = std::function<Vec(const VecRef&)>;

struct JumpBranch {
  std::string id;
  MarginFn guard;  // >= 0 inside this branch's jump set; must be continuous
  MapFn map;
};

struct HybridSystemDef {
  int dim = 0;
  FlowFn flow;
  MarginFn flow_margin;           // >= 0 inside C
  std::vector<JumpBranch> jumps;  // list order is branch priority
  MapFn projector;                // optional, applied after every RK4 step
  // Coordinates that receive additive state disturbances (see etc::perturb).
  // Empty means every coordinate.
  std::vector<bool> disturbance_mask;
};

enum class Priority { JumpFirst, FlowFirst };

struct SolverConfig {
  double dt = 1e-3;
  double event_tol = 1e-10;
  double max_t = 100.0;
  int max_j = 10'000'000;
  int max_consecutive_jumps = 8;
  Priority priority = Priority::JumpFirst;
  // Keep one flow sample every `record_every` grid steps. Post-jump samples and
  // the final sample are always kept.
  int record_every = 1;
  // When false, events carry no pre/post states and post-jump samples are
  // thinned like flow samples (for runs with very many jumps).
  bool record_jump_states = true;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

enum class Termination { Horizon, JumpBudget, ZenoGuard, LeftCandD, NumericalFailure };

const char* to_string(Termination t) noexcept;

struct Sample {
  HybridTime time;
  Vec state;
};

/// A jump. `time` is the hybrid time right after the jump, so the sample that
/// follows the event in the record has the same time and state == post.
struct Event {
  HybridTime time;
  std::string branch;
  Vec pre;
  Vec post;
};

struct RunRecord {
  std::vector<Sample> samples;
  std::vector<Event> events;
  Termination termination = Termination::Horizon;
  std::string diagnostic;
};

/// One RK4 step of the flow over h followed by the projector.
/// Throws NumericalFailure when the flow field is not finite.
Vec integrate_flow_step(const HybridSystemDef& sys, const VecRef& xi, double h);

/// Bisection for a sign change of g on [t_lo, t_hi]. One endpoint must be
/// negative and the other nonnegative; the returned t* keeps g(t*) >= 0 and
/// stops once |g(t*)| <= event_tol (or the bracket reaches rounding width).
/// Throws NoCrossing when the endpoints do not bracket a sign change.
double locate_guard_crossing(const std::function<double(double)>& g, double t_lo, double t_hi,
                             double event_tol);

struct StepOutcome {
  Vec state;
  double elapsed = 0.0;               // flow time consumed, 0 for a jump
  std::optional<std::size_t> branch;  // index of the fired branch, if a jump
};

/// Advance by one jump or one (possibly truncated) flow step starting at `now`.
/// Throws LeftCandD when xi lies outside C and D.
StepOutcome step(const HybridSystemDef& sys, const VecRef& xi, HybridTime now,
                 const SolverConfig& cfg);

/// Run step() until the horizon, the jump budget or an abort. Model errors end
/// up in RunRecord::termination; only invalid configurations throw.
RunRecord solve(const HybridSystemDef& sys, const VecRef& xi0, const SolverConfig& cfg);

/// Index of the first branch whose guard is nonnegative at xi.
std::optional<std::size_t> active_branch(const HybridSystemDef& sys, const VecRef& xi);

}  // namespace hyetc::hybrid
