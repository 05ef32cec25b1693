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

#include "hyetc/hyetc.h"

#include "hyetc/runner.hpp"

#include <limits>
#include <new>
#include <string>

struct hyetc_runspec {
  hyetc::runner::RunSpec spec;
};

struct hyetc_result {
  hyetc::runner::RunOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

hyetc_status fail(hyetc_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

hyetc_status ok() {
  g_last_error.clear();
  return HYETC_OK;
}

hyetc_status from_exit(int code) {
  switch (code) {
    case hyetc::runner::kOk: return HYETC_OK;
    case hyetc::runner::kConfigError: return HYETC_ERR_CONFIG;
    case hyetc::runner::kAborted: return HYETC_ERR_ABORTED;
    case hyetc::runner::kMissingDependency: return HYETC_ERR_MISSING_DEPENDENCY;
    default: return HYETC_ERR_INTERNAL;
  }
}

hyetc_status from_error(const hyetc::Error& e) {
  switch (e.code()) {
    case hyetc::ErrorCode::IoError: return fail(HYETC_ERR_IO, e.what());
    case hyetc::ErrorCode::MissingDependency: return fail(HYETC_ERR_MISSING_DEPENDENCY, e.what());
    default: return fail(HYETC_ERR_CONFIG, e.what());
  }
}

// Runs f, turning exceptions into status codes.
template <class F>
hyetc_status guarded(F&& f) {
  try {
    return f();
  } catch (const hyetc::Error& e) {
    return from_error(e);
  } catch (const std::bad_alloc&) {
    return fail(HYETC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HYETC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HYETC_ERR_INTERNAL, "unknown exception");
  }
}

#define HYETC_REQUIRE(cond, what) \
  if (!(cond)) return fail(HYETC_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* hyetc_version(void) { return "0.1.0"; }

const char* hyetc_last_error(void) { return g_last_error.c_str(); }

hyetc_status hyetc_runspec_new(hyetc_runspec** out) {
  HYETC_REQUIRE(out != nullptr, "out is NULL");
  return guarded([&] {
    *out = new hyetc_runspec{};
    return ok();
  });
}

void hyetc_runspec_free(hyetc_runspec* spec) { delete spec; }

hyetc_status hyetc_runspec_set_scenario(hyetc_runspec* spec, const char* scenario) {
  HYETC_REQUIRE(spec != nullptr && scenario != nullptr, "NULL argument");
  const std::string s = scenario;
  if (s != "linear" && s != "attitude") return fail(HYETC_ERR_CONFIG, "unknown scenario '" + s + "'");
  spec->spec.scenario = s;
  return ok();
}

hyetc_status hyetc_runspec_set_variant(hyetc_runspec* spec, const char* variant) {
  HYETC_REQUIRE(spec != nullptr && variant != nullptr, "NULL argument");
  return guarded([&] {
    spec->spec.variant = hyetc::parse_variant(variant);
    return ok();
  });
}

hyetc_status hyetc_runspec_set_perturb(hyetc_runspec* spec, double rho) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  if (!(rho >= 0.0) || rho == std::numeric_limits<double>::infinity()) {
    return fail(HYETC_ERR_CONFIG, "perturbation must be finite and nonnegative");
  }
  spec->spec.rho = rho;
  return ok();
}

hyetc_status hyetc_runspec_set_seed(hyetc_runspec* spec, uint64_t seed) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  spec->spec.seed = seed;
  return ok();
}

hyetc_status hyetc_runspec_set_horizon(hyetc_runspec* spec, double horizon) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  if (!(horizon > 0.0) || horizon == std::numeric_limits<double>::infinity()) {
    return fail(HYETC_ERR_CONFIG, "horizon must be positive");
  }
  spec->spec.horizon = horizon;
  return ok();
}

hyetc_status hyetc_runspec_set_out_root(hyetc_runspec* spec, const char* dir) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  spec->spec.out_root = dir != nullptr ? dir : "";
  return ok();
}

hyetc_status hyetc_runspec_set_config(hyetc_runspec* spec, const char* path) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  spec->spec.config_path = path != nullptr ? path : "";
  return ok();
}

hyetc_status hyetc_runspec_set_exact_init(hyetc_runspec* spec, int exact) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  spec->spec.exact_sensor = exact != 0;
  return ok();
}

hyetc_status hyetc_runspec_set_period_b(hyetc_runspec* spec, double period) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  if (period > 0.0) {
    spec->spec.period_b = period;
  } else {
    spec->spec.period_b.reset();
  }
  return ok();
}

hyetc_status hyetc_run(const hyetc_runspec* spec, hyetc_result** out) {
  HYETC_REQUIRE(spec != nullptr, "spec is NULL");
  return guarded([&] {
    auto* res = new hyetc_result{hyetc::runner::run_scenario(spec->spec)};
    const hyetc_status s = from_exit(res->outcome.exit_code);
    if (out != nullptr) {
      *out = res;
    } else {
      delete res;
    }
    return s == HYETC_OK ? ok() : fail(s, out != nullptr ? (*out)->outcome.message : "run failed");
  });
}

void hyetc_result_free(hyetc_result* result) { delete result; }

int hyetc_result_exit_code(const hyetc_result* r) { return r != nullptr ? r->outcome.exit_code : -1; }

const char* hyetc_result_message(const hyetc_result* r) { return r != nullptr ? r->outcome.message.c_str() : ""; }

const char* hyetc_result_out_dir(const hyetc_result* r) { return r != nullptr ? r->outcome.out_dir.c_str() : ""; }

const char* hyetc_result_termination(const hyetc_result* r) {
  return r != nullptr ? r->outcome.termination.c_str() : "";
}

int hyetc_result_total_transmissions(const hyetc_result* r) {
  return r != nullptr ? r->outcome.total_transmissions : 0;
}

int hyetc_result_t_star(const hyetc_result* r, double* t_star) {
  if (r == nullptr || !r->outcome.t_star) return 0;
  if (t_star != nullptr) *t_star = *r->outcome.t_star;
  return 1;
}

double hyetc_result_liminf_inter_tx(const hyetc_result* r) {
  return r != nullptr ? r->outcome.liminf_inter_tx : std::numeric_limits<double>::quiet_NaN();
}

int hyetc_result_pflow_n(const hyetc_result* r) { return r != nullptr ? r->outcome.pflow_n : -1; }

double hyetc_result_pflow_tau(const hyetc_result* r) { return r != nullptr ? r->outcome.pflow_tau : 0.0; }

int hyetc_result_max_consecutive_jumps(const hyetc_result* r) {
  return r != nullptr ? r->outcome.max_consecutive_jumps : -1;
}

hyetc_status hyetc_run_suite(const char* suite_path, int* exit_code) {
  HYETC_REQUIRE(suite_path != nullptr, "suite_path is NULL");
  return guarded([&] {
    const int code = hyetc::runner::run_suite(suite_path);
    if (exit_code != nullptr) *exit_code = code;
    return code == 0 ? ok() : fail(from_exit(code), "one or more suite runs failed");
  });
}

}  // extern "C"
