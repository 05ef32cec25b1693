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

#include "hyetc/attitude.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace hyetc::attitude {

namespace {

using math::Quaternion;
using math::Vec3;
using math::Vec4;

Quaternion quat_at(const VecRef& v, int at) {
  return {v[at], Vec3(v[at + 1], v[at + 2], v[at + 3])};
}

void check(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ConfigError, std::string("attitude config: ") + what);
}

Vec4 unit4(const Vec4& v) { return v / v.norm(); }

// observer block of the closed-loop state: (q_hat, w_hat, tau)
constexpr int kNo = 8;

}  // namespace

void AttitudeConfig::validate() const {
  check(alpha1 > 0.0 && alpha1 < 0.5, "alpha1 must lie in (0, 1/2)");
  check(beta1 > 0.0 && beta1 < 1.0, "beta1 must lie in (0, 1)");
  check(delta_c > 0.0 && delta_c < 1.0, "delta_c must lie in (0, 1)");
  check(delta_o > 0.0 && delta_o < 1.0, "delta_o must lie in (0, 1)");
  check(delta > 0.0, "delta must be positive");
  check(tau_bar > 0.0, "tau_bar must be positive");
  check(rho >= 0.0, "rho must be nonnegative");
  check(k1 > 0.0 && k2 > 0.0, "k1 and k2 must be positive");
  check(dt > 0.0, "dt must be positive");
}

AttitudeConfig parse_attitude_config(const std::string& json_text) {
  using json = nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("attitude config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "attitude config: top level must be an object");
  AttitudeConfig cfg;
  const std::pair<const char*, double*> fields[] = {
      {"alpha1", &cfg.alpha1}, {"beta1", &cfg.beta1}, {"delta_c", &cfg.delta_c},
      {"delta_o", &cfg.delta_o}, {"delta", &cfg.delta}, {"tau_bar", &cfg.tau_bar},
      {"rho", &cfg.rho}, {"k1", &cfg.k1}, {"k2", &cfg.k2}, {"dt", &cfg.dt}};
  for (const auto& [key, dst] : fields) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_number()) {
      throw Error(ErrorCode::ConfigError, std::string("attitude config: '") + key + "' must be a number");
    }
    *dst = j.at(key).get<double>();
  }
  cfg.validate();
  return cfg;
}

AttitudeConfig load_attitude_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "attitude config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_attitude_config(ss.str());
}

Vec kappa(const AttitudeConfig& cfg, double xc, const VecRef& x) {
  const Quaternion q = quat_at(x, 0) * xc;
  const Vec3 w = x.segment<3>(4);
  return -math::phi_beta(q, cfg.beta1) - math::sign_power3(w, cfg.beta2());
}

etc::PlantDef plant() {
  etc::PlantDef p;
  p.nx = 7;
  p.nu = 3;
  p.ny = 4;
  p.f = [](const VecRef& x, const VecRef& u) {
    Vec d(7);
    d.head<4>() = math::emat(quat_at(x, 0)) * x.segment<3>(4);
    d.tail<3>() = u;
    return d;
  };
  p.h = [](const VecRef& x) -> Vec { return x.head<4>(); };
  p.project = [](const VecRef& x) {
    Vec out = x;
    out.head<4>() = unit4(x.head<4>());
    return out;
  };
  return p;
}

etc::ControllerDef synergistic_controller(const AttitudeConfig& cfg) {
  etc::ControllerDef c;
  c.id = kControllerSwitch;
  c.nc = 1;
  c.nx = 7;
  c.nu = 3;
  c.flow = [](const VecRef&, const VecRef&) -> Vec { return Vec::Zero(1); };
  c.guard = [dc = cfg.delta_c](const VecRef& xc, const VecRef& x) { return -dc - xc[0] * x[0]; };
  c.jump = [](const VecRef& xc, const VecRef&) -> Vec { return -xc; };
  c.kappa = [cfg](const VecRef& xc, const VecRef& x) { return kappa(cfg, xc[0], x); };
  c.discrete = {true};
  return c;
}

etc::ObserverDef observer(const AttitudeConfig& cfg, bool asymptotic) {
  etc::ObserverDef o;
  o.no = kNo;
  o.ny = 4;
  o.nu = 3;
  o.nxhat = 8;
  o.flow = [cfg, asymptotic](const VecRef& xo, const VecRef& y, const VecRef& u) {
    const Quaternion qh = quat_at(xo, 0);
    const Quaternion err = math::quat_mul(math::quat_conj(qh), quat_at(y, 0));
    Vec3 inj1, inj2;
    if (asymptotic) {
      inj1 = cfg.k1 * err.e;
      inj2 = cfg.k2 * err.e;
    } else {
      inj1 = math::phi_beta(err, cfg.alpha1);
      inj2 = math::phi_beta(err, cfg.alpha2());
    }
    Vec d(kNo);
    d.head<4>() = math::emat(qh) * (xo.segment<3>(4) + inj1);
    d.segment<3>(4) = u + inj2;
    d[7] = 1.0;
    return d;
  };
  o.branches.push_back(
      {kObserverFlip,
       [dlo = cfg.delta_o](const VecRef& xo, const VecRef& y, const VecRef&) {
         const Quaternion err = math::quat_mul(math::quat_conj(quat_at(xo, 0)), quat_at(y, 0));
         return -dlo - err.n;
       },
       [](const VecRef& xo, const VecRef&, const VecRef&) {
         Vec out = xo;
         out.head<4>() = -xo.head<4>();
         return out;
       }});
  o.output = [](const VecRef& xo, const VecRef& y) {
    Vec xhat(8);
    xhat << y.head<4>(), xo.segment<3>(4), xo[7];
    return xhat;
  };
  o.project = [](const VecRef& xo) {
    Vec out = xo;
    out.head<4>() = unit4(xo.head<4>());
    return out;
  };
  return o;
}

namespace {

etc::SyntheticDef synthetic(bool deviation, double delta, double period) {
  etc::SyntheticDef s;
  s.nx = 7;
  s.nxhat = 8;
  s.reset = [](const VecRef& xhat) -> Vec { return xhat.head<7>(); };
  if (deviation) {
    s.triggers.push_back({kTransmit, etc::TriggerClass::Transmission,
                          [delta](const VecRef& xs, const VecRef&, const VecRef& xhat) {
                            return (xs.segment<3>(4) - xhat.segment<3>(4)).norm() - delta;
                          },
                          nullptr});
  }
  s.triggers.push_back({kWatchdog, etc::TriggerClass::Timer,
                        [period](const VecRef&, const VecRef&, const VecRef& xhat) {
                          return xhat[7] - period;
                        },
                        [](const VecRef& xo) {
                          Vec out = xo;
                          out[7] = 0.0;
                          return out;
                        }});
  return s;
}

Scenario assemble(const AttitudeConfig& cfg, bool asymptotic, bool deviation, double period) {
  cfg.validate();
  Scenario sc;
  sc.system = etc::compose_closed_loop(plant(), synergistic_controller(cfg), observer(cfg, asymptotic),
                                       synthetic(deviation, cfg.delta, period));
  if (cfg.rho > 0.0) sc.system = etc::perturb(sc.system, cfg.rho);
  sc.sets = target_sets(period);
  sc.layout = etc::Layout{7, 1, kNo};
  sc.transmission_branches = {kWatchdog};
  if (deviation) sc.transmission_branches.insert(sc.transmission_branches.begin(), kTransmit);
  sc.dt = cfg.dt;
  return sc;
}

}  // namespace

Scenario build_attitude_scenario(const AttitudeConfig& cfg) {
  return assemble(cfg, false, true, cfg.tau_bar);
}

Scenario make_attitude_comparison_variant(Variant kind, const AttitudeConfig& cfg,
                                          std::optional<double> period_b) {
  switch (kind) {
    case Variant::Ours: return build_attitude_scenario(cfg);
    case Variant::A: return assemble(cfg, true, true, cfg.tau_bar);
    case Variant::B:
      if (!period_b || !(*period_b > 0.0) || !std::isfinite(*period_b)) {
        throw Error(ErrorCode::ConfigError, "variant b needs a positive finite period");
      }
      return assemble(cfg, false, false, *period_b);
    case Variant::C: return assemble(cfg, false, false, cfg.dt);
  }
  throw Error(ErrorCode::ConfigError, "unknown variant");
}

hybrid::HybridSystemDef build_nominal(const AttitudeConfig& cfg) {
  cfg.validate();
  return etc::compose_nominal(plant(), synergistic_controller(cfg));
}

Vec initial_state(std::uint64_t seed, InitMode mode) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  Vec4 q;
  do {
    for (int i = 0; i < 4; ++i) q[i] = gauss(rng);
  } while (q.norm() < 1e-6);
  q.normalize();
  Vec3 w;
  do {
    for (int i = 0; i < 3; ++i) w[i] = unif(rng);
  } while (w.squaredNorm() > 1.0);

  Vec xi = Vec::Zero(idx::dim);
  xi.segment<4>(idx::q) = q;
  xi.segment<3>(idx::w) = w;
  xi[idx::xc] = 1.0;
  xi.segment<4>(idx::qs) = q;
  if (mode == InitMode::ExactSensor) {
    xi.segment<3>(idx::ws) = w;
    xi.segment<4>(idx::qhat) = q;
    xi.segment<3>(idx::what) = w;
  } else {
    xi[idx::qhat] = 1.0;
  }
  return xi;
}

etc::TargetSets target_sets(double tau_bar) {
  etc::TargetSets s;
  s.a0 = [](const VecRef& xi) {
    double best = std::numeric_limits<double>::infinity();
    for (double c : {-1.0, 1.0}) {
      Vec4 target = Vec4::Zero();
      target[0] = c;
      const double d2 = (xi[idx::xc] - c) * (xi[idx::xc] - c) +
                        (xi.segment<4>(idx::q) - target).squaredNorm() +
                        xi.segment<3>(idx::w).squaredNorm();
      best = std::min(best, d2);
    }
    return std::sqrt(best);
  };
  s.as = [tau_bar](const VecRef& xi) {
    const double d2 =
        math::unit_diagonal_dist2({xi.segment<4>(idx::q), xi.segment<4>(idx::qs), xi.segment<4>(idx::qhat)}) +
        math::diagonal_dist2({xi.segment<3>(idx::w), xi.segment<3>(idx::ws), xi.segment<3>(idx::what)}) +
        math::interval_dist2(xi[idx::tau], 0.0, tau_bar);
    return std::sqrt(d2);
  };
  s.a = [tau_bar](const VecRef& xi) {
    double best = std::numeric_limits<double>::infinity();
    for (double c : {-1.0, 1.0}) {
      Vec4 target = Vec4::Zero();
      target[0] = c;
      const double d2 = (xi[idx::xc] - c) * (xi[idx::xc] - c) +
                        (xi.segment<4>(idx::q) - target).squaredNorm() +
                        (xi.segment<4>(idx::qs) - target).squaredNorm() +
                        (xi.segment<4>(idx::qhat) - target).squaredNorm() +
                        xi.segment<3>(idx::w).squaredNorm() + xi.segment<3>(idx::ws).squaredNorm() +
                        xi.segment<3>(idx::what).squaredNorm();
      best = std::min(best, d2);
    }
    return std::sqrt(best + math::interval_dist2(xi[idx::tau], 0.0, tau_bar));
  };
  return s;
}

}  // namespace hyetc::attitude
