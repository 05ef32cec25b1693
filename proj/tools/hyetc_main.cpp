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

// hyetc-run: command-line front end over the C API.
//
//   hyetc-run run --scenario attitude --variant ours --seed 7
//   hyetc-run suite runs.json

#include <hyetc/hyetc.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace {

constexpr int kConfigExit = 2;

int check(hyetc_status s) {
  if (s == HYETC_OK) return 0;
  std::fprintf(stderr, "hyetc-run: %s\n", hyetc_last_error());
  switch (s) {
    case HYETC_ERR_INVALID_ARGUMENT:
    case HYETC_ERR_CONFIG: return kConfigExit;
    case HYETC_ERR_ABORTED: return 3;
    case HYETC_ERR_MISSING_DEPENDENCY: return 4;
    default: return 1;
  }
}

struct RunArgs {
  std::string scenario = "attitude";
  std::string variant = "ours";
  double perturb = 0.0;
  std::uint64_t seed = 1;
  double horizon = 100.0;
  std::string out;
  std::string config;
  double period_b = 0.0;
  bool exact_init = false;
};

int do_run(const RunArgs& a) {
  hyetc_runspec* spec = nullptr;
  if (int rc = check(hyetc_runspec_new(&spec))) return rc;
  int rc = 0;
  rc = rc ? rc : check(hyetc_runspec_set_scenario(spec, a.scenario.c_str()));
  rc = rc ? rc : check(hyetc_runspec_set_variant(spec, a.variant.c_str()));
  rc = rc ? rc : check(hyetc_runspec_set_perturb(spec, a.perturb));
  rc = rc ? rc : check(hyetc_runspec_set_seed(spec, a.seed));
  rc = rc ? rc : check(hyetc_runspec_set_horizon(spec, a.horizon));
  if (!a.out.empty()) rc = rc ? rc : check(hyetc_runspec_set_out_root(spec, a.out.c_str()));
  if (!a.config.empty()) rc = rc ? rc : check(hyetc_runspec_set_config(spec, a.config.c_str()));
  rc = rc ? rc : check(hyetc_runspec_set_exact_init(spec, a.exact_init ? 1 : 0));
  rc = rc ? rc : check(hyetc_runspec_set_period_b(spec, a.period_b));
  if (rc != 0) {
    hyetc_runspec_free(spec);
    return rc;
  }

  hyetc_result* res = nullptr;
  hyetc_run(spec, &res);
  hyetc_runspec_free(spec);
  if (res == nullptr) {
    std::fprintf(stderr, "hyetc-run: %s\n", hyetc_last_error());
    return 1;
  }
  const int code = hyetc_result_exit_code(res);
  if (code == 0) {
    double ts = 0.0;
    const bool reached = hyetc_result_t_star(res, &ts) != 0;
    const double li = hyetc_result_liminf_inter_tx(res);
    std::printf("%s: %s, %d transmissions, t*=%s, liminf=%s, pflow N=%d tau=%g\n", hyetc_result_out_dir(res),
                hyetc_result_termination(res), hyetc_result_total_transmissions(res),
                reached ? std::to_string(ts).c_str() : "none",
                std::isfinite(li) ? std::to_string(li).c_str() : "inf", hyetc_result_pflow_n(res),
                hyetc_result_pflow_tau(res));
  } else {
    std::fprintf(stderr, "hyetc-run: %s\n", hyetc_result_message(res));
  }
  hyetc_result_free(res);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered hybrid control runs"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run one scenario/variant and write its artifacts");
  run->add_option("--scenario", ra.scenario, "linear or attitude")
      ->check(CLI::IsMember({"linear", "attitude"}))
      ->capture_default_str();
  run->add_option("--variant", ra.variant, "ours, a, b or c")
      ->check(CLI::IsMember({"ours", "a", "b", "c"}))
      ->capture_default_str();
  run->add_option("--perturb", ra.perturb, "disturbance magnitude rho")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  run->add_option("--seed", ra.seed, "initial condition seed")->capture_default_str();
  run->add_option("--horizon", ra.horizon, "simulated seconds")->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--out", ra.out, "output root (default $HYETC_OUT, else ./out)");
  run->add_option("--config", ra.config, "scenario configuration JSON");
  run->add_option("--period-b", ra.period_b, "period for variant b; default from the ours run");
  run->add_flag("--exact-init", ra.exact_init, "start the sensor copy and observers at the true state");

  std::string suite_path;
  auto* suite = app.add_subcommand("suite", "Run every entry of a suite file and write index.json");
  suite->add_option("file", suite_path, "suite JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  if (*run) return do_run(ra);

  int worst = 0;
  const hyetc_status s = hyetc_run_suite(suite_path.c_str(), &worst);
  if (s != HYETC_OK && worst == 0) return check(s);
  if (worst != 0) std::fprintf(stderr, "hyetc-run: %s\n", hyetc_last_error());
  std::printf("suite finished, exit %d\n", worst);
  return worst;
}
