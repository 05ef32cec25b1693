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

#include <string>
#include <vector>

namespace hyetc {

/// ours: finite-time observer + deviation and watchdog triggering.
/// a: asymptotic observer, same triggering.  b: periodic transmission only.
/// c: transmission at integration rate.
enum class Variant { Ours, A, B, C };

const char* to_string(Variant v) noexcept;
Variant parse_variant(const std::string& s);

enum class InitMode {
  Default,      // sensor starts from its own uninformed estimate
  ExactSensor,  // x_s = x and observer consistent with x at t = 0
};

/// A closed-loop system ready to simulate, with its target sets and the ids of
/// the branches that send a message over the sensor-to-controller channel.
struct Scenario {
  hybrid::HybridSystemDef system;
  etc::TargetSets sets;
  etc::Layout layout;
  std::vector<std::string> transmission_branches;
  double dt = 1e-3;  // integration step the scenario is tuned for
};

}  // namespace hyetc
