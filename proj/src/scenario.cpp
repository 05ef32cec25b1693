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

#include "hyetc/scenario.hpp"

namespace hyetc {

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Ours: return "ours";
    case Variant::A: return "a";
    case Variant::B: return "b";
    case Variant::C: return "c";
  }
  return "unknown";
}

Variant parse_variant(const std::string& s) {
  if (s == "ours") return Variant::Ours;
  if (s == "a") return Variant::A;
  if (s == "b") return Variant::B;
  if (s == "c") return Variant::C;
  throw Error(ErrorCode::ConfigError, "unknown variant '" + s + "' (expected ours, a, b or c)");
}

}  // namespace hyetc
