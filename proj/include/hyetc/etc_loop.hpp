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
 * @file etc_loop.hpp
 * @brief Model-based event-triggered loop built from plant, controller,
 * observer and synthetic model.
 *
 * Closed-loop state layout is xi = (x, x_c, x_s, x_o). The controller and the
 * input law read the synthetic state x_s in place of x, and x_s flows with the
 * plant model f itself. Flow sets are the closures of the complements of the
 * corresponding jump sets, so C is {every guard <= 0}.
 */

#pragma once

#include "hyetc/hybrid.hpp"
#include "hyetc/mathkit.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hyetc::etc {

using Fn2 = std::function<Vec(const VecRef&, const VecRef&)>;
using Fn3 = std::function<Vec(const VecRef&, const VecRef&, const VecRef&)>;
using Guard2 = std::function<double(const VecRef&, const VecRef&)>;
using Guard3 = std::function<double(const VecRef&, const VecRef&, const VecRef&)>;

struct PlantDef {
  int nx = 0;
  int nu = 0;
  int ny = 0;
  Fn2 f;                                     // (x, u) -> dx/dt
  std::function<Vec(const VecRef&)> h;       // x -> y
  std::function<Vec(const VecRef&)> project; // optional normalization of x
};

struct ControllerDef {
  std::string id = "controller";
  int nc = 0;
  int nx = 0;  // dimension of the state fed back
  int nu = 0;
  Fn2 flow;      // (x_c, x) -> dx_c/dt
  Guard2 guard;  // (x_c, x) -> margin, >= 0 in D_c
  Fn2 jump;      // (x_c, x) -> x_c+
  Fn2 kappa;     // (x_c, x) -> u
  std::vector<bool> discrete;  // logic coordinates, never disturbed
};

struct ObserverBranch {
  std::string id;
  Guard3 guard;  // (x_o, y, u)
  Fn3 map;       // (x_o, y, u) -> x_o+
};

struct ObserverDef {
  int no = 0;
  int ny = 0;
  int nu = 0;
  int nxhat = 0;
  Fn3 flow;                              // (x_o, y, u) -> dx_o/dt
  std::vector<ObserverBranch> branches;
  Fn2 output;                            // (x_o, y) -> xhat
  std::function<Vec(const VecRef&)> project;
  std::vector<bool> discrete;
};

enum class TriggerClass { Transmission, Timer };

/// Sensor-side triggering condition. Firing sends xhat over the channel:
/// x_s+ = reset(xhat), and optionally updates the observer state (timer reset).
struct Trigger {
  std::string id;
  TriggerClass cls = TriggerClass::Transmission;
  std::function<double(const VecRef& xs, const VecRef& u, const VecRef& xhat)> guard;
  std::function<Vec(const VecRef& xo)> observer_update;  // optional
};

struct SyntheticDef {
  int nx = 0;
  int nxhat = 0;
  std::function<Vec(const VecRef&)> reset;  // xhat -> x_s+
  std::vector<Trigger> triggers;
};

/// Offsets of the four blocks of xi.
struct Layout {
  int nx = 0;
  int nc = 0;
  int no = 0;

  [[nodiscard]] int x() const { return 0; }
  [[nodiscard]] int xc() const { return nx; }
  [[nodiscard]] int xs() const { return nx + nc; }
  [[nodiscard]] int xo() const { return 2 * nx + nc; }
  [[nodiscard]] int dim() const { return 2 * nx + nc + no; }
};

/// Distance evaluators of a scenario. All three take the full closed-loop
/// state; a0 measures the (x, x_c) projection.
struct TargetSets {
  math::SetDistanceFn a0;
  math::SetDistanceFn as;
  math::SetDistanceFn a;
};

/// H0 on (x, x_c) with the controller fed the true plant state.
hybrid::HybridSystemDef compose_nominal(const PlantDef& plant, const ControllerDef& ctrl);

/// The closed loop on xi = (x, x_c, x_s, x_o). Branch order: observer
/// branches, transmission triggers, timer triggers, controller.
hybrid::HybridSystemDef compose_closed_loop(const PlantDef& plant, const ControllerDef& ctrl,
                                            const ObserverDef& obs, const SyntheticDef& syn);

/// Appends a clock coordinate (last entry of the state) and adds
/// rho sin(t) (1, ..., 1) to the flow of every coordinate enabled in the
/// system's disturbance mask. Guards and jump maps see the original state.
hybrid::HybridSystemDef perturb(const hybrid::HybridSystemDef& sys, double rho);

}  // namespace hyetc::etc
