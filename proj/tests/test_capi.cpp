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

// Exercises libhyetc through its C header only.

#include "hyetc/hyetc.h"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kData = HYETC_DATA_DIR;

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hyetc_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Spec {
  hyetc_runspec* h = nullptr;
  Spec() { REQUIRE(hyetc_runspec_new(&h) == HYETC_OK); }
  ~Spec() { hyetc_runspec_free(h); }
};

}  // namespace

TEST_CASE("version string is non-empty") {
  CHECK(std::string(hyetc_version()).size() > 0);
}

TEST_CASE("null handles and bad values are rejected") {
  CHECK(hyetc_runspec_new(nullptr) == HYETC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(hyetc_last_error()).size() > 0);
  CHECK(hyetc_runspec_set_seed(nullptr, 1) == HYETC_ERR_INVALID_ARGUMENT);
  CHECK(hyetc_run(nullptr, nullptr) == HYETC_ERR_INVALID_ARGUMENT);

  Spec s;
  CHECK(hyetc_runspec_set_scenario(s.h, "orbit") == HYETC_ERR_CONFIG);
  CHECK(hyetc_runspec_set_scenario(s.h, nullptr) == HYETC_ERR_INVALID_ARGUMENT);
  CHECK(hyetc_runspec_set_variant(s.h, "d") == HYETC_ERR_CONFIG);
  CHECK(hyetc_runspec_set_horizon(s.h, -1.0) == HYETC_ERR_CONFIG);
  CHECK(hyetc_runspec_set_perturb(s.h, -1e-3) == HYETC_ERR_CONFIG);
  CHECK(hyetc_runspec_set_perturb(s.h, NAN) == HYETC_ERR_CONFIG);
  CHECK(std::string(hyetc_last_error()).size() > 0);

  // result getters tolerate null
  CHECK(hyetc_result_message(nullptr) != nullptr);
  double t = -1.0;
  CHECK(hyetc_result_t_star(nullptr, &t) == 0);
  hyetc_result_free(nullptr);
  hyetc_runspec_free(nullptr);
}

TEST_CASE("a linear run through the C API") {
  const auto out = fresh("run");
  Spec s;
  REQUIRE(hyetc_runspec_set_scenario(s.h, "linear") == HYETC_OK);
  REQUIRE(hyetc_runspec_set_variant(s.h, "ours") == HYETC_OK);
  REQUIRE(hyetc_runspec_set_seed(s.h, 4) == HYETC_OK);
  REQUIRE(hyetc_runspec_set_horizon(s.h, 30.0) == HYETC_OK);
  REQUIRE(hyetc_runspec_set_out_root(s.h, out.string().c_str()) == HYETC_OK);
  REQUIRE(hyetc_runspec_set_config(s.h, (kData + "/batch_reactor.json").c_str()) == HYETC_OK);

  hyetc_result* r = nullptr;
  REQUIRE(hyetc_run(s.h, &r) == HYETC_OK);
  REQUIRE(r != nullptr);
  CHECK(hyetc_result_exit_code(r) == 0);
  CHECK(std::string(hyetc_result_termination(r)) == "horizon");
  CHECK(std::string(hyetc_result_out_dir(r)) == (out / "linear" / "ours").string());
  CHECK(hyetc_result_total_transmissions(r) > 0);
  CHECK(hyetc_result_max_consecutive_jumps(r) <= 4);
  CHECK(hyetc_result_pflow_tau(r) > 0.0);
  CHECK(hyetc_result_pflow_n(r) >= 0);
  double t_star = -1.0;
  if (hyetc_result_t_star(r, &t_star)) CHECK(t_star >= 0.0);
  CHECK(fs::exists(out / "linear" / "ours" / "summary.json"));
  hyetc_result_free(r);

  // b now finds the ours summary
  REQUIRE(hyetc_runspec_set_variant(s.h, "b") == HYETC_OK);
  r = nullptr;
  CHECK(hyetc_run(s.h, &r) == HYETC_OK);
  hyetc_result_free(r);
}

TEST_CASE("statuses mirror exit codes") {
  const auto out = fresh("status");
  Spec s;
  REQUIRE(hyetc_runspec_set_scenario(s.h, "attitude") == HYETC_OK);
  REQUIRE(hyetc_runspec_set_variant(s.h, "b") == HYETC_OK);
  REQUIRE(hyetc_runspec_set_horizon(s.h, 5.0) == HYETC_OK);
  REQUIRE(hyetc_runspec_set_out_root(s.h, out.string().c_str()) == HYETC_OK);
  hyetc_result* r = nullptr;
  CHECK(hyetc_run(s.h, &r) == HYETC_ERR_MISSING_DEPENDENCY);
  REQUIRE(r != nullptr);
  CHECK(hyetc_result_exit_code(r) == 4);
  CHECK(std::string(hyetc_result_message(r)).size() > 0);
  hyetc_result_free(r);

  // explicit period lifts the dependency
  REQUIRE(hyetc_runspec_set_period_b(s.h, 1.0) == HYETC_OK);
  r = nullptr;
  CHECK(hyetc_run(s.h, &r) == HYETC_OK);
  CHECK(hyetc_result_total_transmissions(r) >= 4);
  hyetc_result_free(r);

  REQUIRE(hyetc_runspec_set_config(s.h, "/nonexistent/attitude.json") == HYETC_OK);
  CHECK(hyetc_run(s.h, nullptr) == HYETC_ERR_CONFIG);
}

TEST_CASE("suite through the C API") {
  const auto dir = fresh("suite");
  std::ofstream(dir / "suite.json")
      << R"({"out": "res", "runs": [{"scenario": "linear", "variant": "ours", "horizon": 3}]})";
  int code = -1;
  CHECK(hyetc_run_suite((dir / "suite.json").string().c_str(), &code) == HYETC_OK);
  CHECK(code == 0);
  CHECK(fs::exists(dir / "res" / "index.json"));
  CHECK(hyetc_run_suite((dir / "nothing.json").string().c_str(), &code) != HYETC_OK);
  CHECK(hyetc_run_suite(nullptr, &code) == HYETC_ERR_INVALID_ARGUMENT);
}
