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
 * @file attitude.hpp
 * @brief Rigid-body attitude stabilization over an event-triggered channel.
 *
 * Plant: dq/dt = E(q) w, dw/dt = u, y = q. A synergistic controller with logic
 * state x_c in {-1, 1} applies u = -phi_b1(x_c q_s) - sig(w_s)^b2 from the
 * synthetic copy x_s = (q_s, w_s). A fractional-power observer recovers w in
 * finite time; the sensor transmits (q, w_hat) when |w_s - w_hat| >= delta
 * or when its timer reaches tau_bar.
 *
 * State: xi = (q, w, x_c, q_s, w_s, q_hat, w_hat, tau), 23 coordinates.
 */

#pragma once

#include "hyetc/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace hyetc::attitude {

struct AttitudeConfig {
  double alpha1 = 1.0 / 3.0;
  double beta1 = 1.0 / 3.0;
  double delta_c = 0.5;
  double delta_o = 0.5;
  double delta = 1.0;
  double tau_bar = 5.0;
  double rho = 0.0;
  // Injection gains of the asymptotic comparison observer.
  double k1 = 0.5;
  double k2 = 0.5;
  double dt = 1e-4;

  [[nodiscard]] double alpha2() const { return 2.0 * alpha1; }
  [[nodiscard]] double beta2() const { return (2.0 - 2.0 * beta1) / (2.0 - beta1); }

  /// Throws ConfigError naming the first parameter out of range.
  void validate() const;
};

/// JSON object with any of the fields above as keys. Throws ConfigError.
AttitudeConfig parse_attitude_config(const std::string& json_text);
AttitudeConfig load_attitude_config(const std::string& path);

namespace idx {
inline constexpr int q = 0;
inline constexpr int w = 4;
inline constexpr int xc = 7;
inline constexpr int qs = 8;
inline constexpr int ws = 12;
inline constexpr int qhat = 15;
inline constexpr int what = 19;
inline constexpr int tau = 22;
inline constexpr int dim = 23;
}  // namespace idx

inline const char* kObserverFlip = "observer.flip";
inline const char* kTransmit = "sensor.transmit";
inline const char* kWatchdog = "sensor.watchdog";
inline const char* kControllerSwitch = "controller.switch";

etc::PlantDef plant();
etc::ControllerDef synergistic_controller(const AttitudeConfig& cfg);
/// Finite-time observer (fractional-power injection), or the asymptotic one
/// with linear injection k1 e, k2 e when `asymptotic` is set.
etc::ObserverDef observer(const AttitudeConfig& cfg, bool asymptotic = false);

/// u = kappa(x_c, (q, w)).
Vec kappa(const AttitudeConfig& cfg, double xc, const VecRef& x);

Scenario build_attitude_scenario(const AttitudeConfig& cfg);

/// Comparison loops: a (asymptotic observer), b (period_b timer only),
/// c (transmission every integration step). Ours is accepted too.
/// Throws ConfigError when b is requested without a positive period.
Scenario make_attitude_comparison_variant(Variant kind, const AttitudeConfig& cfg,
                                          std::optional<double> period_b = std::nullopt);

/// Nominal loop H0 on (q, w, x_c).
hybrid::HybridSystemDef build_nominal(const AttitudeConfig& cfg);

/// Default: q(0) uniform on S^3, w(0) uniform in the unit ball, x_c = 1,
/// x_s = (q(0), 0), observer at (1, 0, 0). ExactSensor: x_s = x, observer = (x, 0).
Vec initial_state(std::uint64_t seed, InitMode mode = InitMode::Default);

etc::TargetSets target_sets(double tau_bar);

}  // namespace hyetc::attitude
