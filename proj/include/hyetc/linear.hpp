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
 * @file linear.hpp
 * @brief LTI plant under sampled-data state feedback, with a finite-time
 * observer built from two Luenberger observers and a delayed fusion step.
 *
 * Closed-loop coordinates:
 *   x                    plant state
 *   x_c = (u_held, tau_c) held input and controller sampling timer
 *   x_s                  synthetic plant copy
 *   x_o = (z1, z2, m, tau_o, armed, tau_w)
 *
 * Every d_obs seconds the observer fuses: with F_i = A - L_i C and
 * dz = z1 - z2, the error of z1 is e1 = e^{F1 d} (e^{F1 d} - e^{F2 d})^{-1}
 * (dz - e^{F2 d} m), where m is dz right after the previous tick. Both
 * observers are then reset to z1 - e1. The first tick only stores m.
 * The estimate sent over the channel is z1.
 */

#pragma once

#include "hyetc/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace hyetc::linear {

struct LinearConfig {
  std::string name = "linear";
  Mat A, B, C;
  Mat K;  // u = K x
  Mat L1, L2;
  double h_c = 0.05;
  double d_obs = 1.0;
  double delta = 0.1;
  double tau_bar = 10.0;
  double rho = 0.0;
  double dt = 1e-3;
  // Initial plant state; drawn uniformly from [-x0_scale, x0_scale]^n by seed when absent.
  std::optional<Vec> x0;
  double x0_scale = 1.0;

  [[nodiscard]] int nx() const { return static_cast<int>(A.rows()); }
  [[nodiscard]] int nu() const { return static_cast<int>(B.cols()); }
  [[nodiscard]] int ny() const { return static_cast<int>(C.rows()); }

  /// Shape, range, stabilizability/detectability (PBH), observer Hurwitz,
  /// fusion conditioning and sampled-loop Schur checks. Throws ConfigError
  /// (SingularFusion for the fusion matrix) naming the failed condition.
  void validate() const;
};

/// Parse from JSON text. Matrices are arrays of rows. Throws ConfigError.
LinearConfig parse_linear_config(const std::string& json_text);
LinearConfig load_linear_config(const std::string& path);
std::string to_json_text(const LinearConfig& cfg);

/// Four-state, two-input batch reactor with offline LQR gain and
/// pole-placed observer gains.
LinearConfig batch_reactor_config();
/// x'' = u, y = position, K from the LQR problem with Q = I, R = 1.
LinearConfig double_integrator_config();

struct FusionMatrices {
  Mat gain;   // e^{F1 d} (e^{F1 d} - e^{F2 d})^{-1}
  Mat decay2; // e^{F2 d}
  double condition = 0.0;
};

/// Throws SingularFusion when the condition number exceeds 1e12.
FusionMatrices fusion_matrices(const Mat& F1, const Mat& F2, double d);
FusionMatrices fusion_matrices(const LinearConfig& cfg);

/// x_hat = z1 - gain (dz - decay2 m).
Vec fuse_finite_time(const FusionMatrices& fm, const VecRef& z1, const VecRef& z2, const VecRef& m);

/// Largest eigenvalue modulus of the ideal sampled loop e^{A h} + int_0^h e^{As} ds B K.
double sampled_spectral_radius(const Mat& A, const Mat& B, const Mat& K, double h);

/// Offsets into the closed-loop state.
struct Index {
  int nx = 0;
  int nu = 0;
  [[nodiscard]] int x() const { return 0; }
  [[nodiscard]] int uh() const { return nx; }
  [[nodiscard]] int tc() const { return nx + nu; }
  [[nodiscard]] int xs() const { return nx + nu + 1; }
  [[nodiscard]] int z1() const { return 2 * nx + nu + 1; }
  [[nodiscard]] int z2() const { return 3 * nx + nu + 1; }
  [[nodiscard]] int m() const { return 4 * nx + nu + 1; }
  [[nodiscard]] int to() const { return 5 * nx + nu + 1; }
  [[nodiscard]] int armed() const { return 5 * nx + nu + 2; }
  [[nodiscard]] int tw() const { return 5 * nx + nu + 3; }
  [[nodiscard]] int dim() const { return 5 * nx + nu + 4; }
};

inline const char* kControllerTick = "controller.sample";
inline const char* kFusion = "observer.fusion";
inline const char* kTransmit = "sensor.transmit";
inline const char* kWatchdog = "sensor.watchdog";

Scenario build_linear_scenario(const LinearConfig& cfg);

/// a: single Luenberger observer (z1), no fusion. b: timer-only transmission
/// every period_b. c: transmission every h_c / 10.
Scenario make_linear_comparison_variant(Variant kind, const LinearConfig& cfg,
                                        std::optional<double> period_b = std::nullopt);

/// H0 on (x, u_held, tau_c) with the controller sampling x itself.
hybrid::HybridSystemDef build_nominal(const LinearConfig& cfg);

/// Default: observers and x_s at 0, u_held = 0, both sampling timers due at t = 0.
/// ExactSensor: x_s = z1 = z2 = x.
Vec initial_state(const LinearConfig& cfg, std::uint64_t seed, InitMode mode = InitMode::Default);

etc::TargetSets target_sets(const LinearConfig& cfg, double tau_bar);

}  // namespace hyetc::linear
