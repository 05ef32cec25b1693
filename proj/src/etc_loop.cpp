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

#include "hyetc/etc_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace hyetc::etc {

namespace {

using hybrid::HybridSystemDef;
using hybrid::JumpBranch;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

// C is the closure of the complement of D.
void set_margin_from_guards(HybridSystemDef& sys) {
  auto jumps = std::make_shared<const std::vector<JumpBranch>>(sys.jumps);
  sys.flow_margin = [jumps](const VecRef& xi) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& b : *jumps) worst = std::max(worst, b.guard(xi));
    return jumps->empty() ? 1.0 : -worst;
  };
}

std::vector<bool> mask_or_default(const std::vector<bool>& discrete, int n) {
  std::vector<bool> out(static_cast<std::size_t>(n), true);
  for (std::size_t i = 0; i < discrete.size() && i < out.size(); ++i) out[i] = !discrete[i];
  return out;
}

struct Loop {
  PlantDef plant;
  ControllerDef ctrl;
  ObserverDef obs;
  SyntheticDef syn;
  Layout lay;

  [[nodiscard]] auto x(const VecRef& xi) const { return xi.segment(lay.x(), lay.nx); }
  [[nodiscard]] auto xc(const VecRef& xi) const { return xi.segment(lay.xc(), lay.nc); }
  [[nodiscard]] auto xs(const VecRef& xi) const { return xi.segment(lay.xs(), lay.nx); }
  [[nodiscard]] auto xo(const VecRef& xi) const { return xi.segment(lay.xo(), lay.no); }
  [[nodiscard]] Vec u(const VecRef& xi) const { return ctrl.kappa(xc(xi), xs(xi)); }
  [[nodiscard]] Vec y(const VecRef& xi) const { return plant.h(x(xi)); }
  [[nodiscard]] Vec xhat(const VecRef& xi) const { return obs.output(xo(xi), y(xi)); }
};

}  // namespace

HybridSystemDef compose_nominal(const PlantDef& plant, const ControllerDef& ctrl) {
  require(plant.f && plant.h, "plant needs f and h");
  require(ctrl.kappa && ctrl.nx == plant.nx && ctrl.nu == plant.nu,
          "controller dimensions do not match the plant");
  require(ctrl.nc == 0 || ctrl.flow, "controller with state needs a flow map");

  const int nx = plant.nx;
  const int nc = ctrl.nc;
  auto p = std::make_shared<const std::pair<PlantDef, ControllerDef>>(plant, ctrl);

  HybridSystemDef sys;
  sys.dim = nx + nc;
  sys.flow = [p, nx, nc](const VecRef& xi) {
    const auto& [pl, c] = *p;
    const auto x = xi.head(nx);
    const auto xc = xi.tail(nc);
    Vec out(nx + nc);
    out.head(nx) = pl.f(x, c.kappa(xc, x));
    if (nc > 0) out.tail(nc) = c.flow(xc, x);
    return out;
  };
  if (ctrl.guard) {
    sys.jumps.push_back({ctrl.id,
                         [p, nx, nc](const VecRef& xi) { return p->second.guard(xi.tail(nc), xi.head(nx)); },
                         [p, nx, nc](const VecRef& xi) {
                           Vec out = xi;
                           out.tail(nc) = p->second.jump(xi.tail(nc), xi.head(nx));
                           return out;
                         }});
  }
  set_margin_from_guards(sys);
  if (plant.project) {
    sys.projector = [p, nx](const VecRef& xi) {
      Vec out = xi;
      out.head(nx) = p->first.project(xi.head(nx));
      return out;
    };
  }
  sys.disturbance_mask = std::vector<bool>(static_cast<std::size_t>(nx), true);
  const auto cm = mask_or_default(ctrl.discrete, nc);
  sys.disturbance_mask.insert(sys.disturbance_mask.end(), cm.begin(), cm.end());
  return sys;
}

HybridSystemDef compose_closed_loop(const PlantDef& plant, const ControllerDef& ctrl,
                                    const ObserverDef& obs, const SyntheticDef& syn) {
  require(plant.f && plant.h, "plant needs f and h");
  require(ctrl.kappa && ctrl.nx == plant.nx && ctrl.nu == plant.nu,
          "controller dimensions do not match the plant");
  require(ctrl.nc == 0 || ctrl.flow, "controller with state needs a flow map");
  require(obs.flow && obs.output, "observer needs flow and output maps");
  require(obs.ny == plant.ny && obs.nu == plant.nu, "observer dimensions do not match the plant");
  require(syn.reset && syn.nx == plant.nx && syn.nxhat == obs.nxhat,
          "synthetic model dimensions do not match plant and observer");

  auto L = std::make_shared<const Loop>(Loop{plant, ctrl, obs, syn, Layout{plant.nx, ctrl.nc, obs.no}});
  const Layout lay = L->lay;

  HybridSystemDef sys;
  sys.dim = lay.dim();
  sys.flow = [L](const VecRef& xi) {
    const Layout& l = L->lay;
    const Vec u = L->u(xi);
    Vec out(l.dim());
    out.segment(l.x(), l.nx) = L->plant.f(L->x(xi), u);
    if (l.nc > 0) out.segment(l.xc(), l.nc) = L->ctrl.flow(L->xc(xi), L->xs(xi));
    out.segment(l.xs(), l.nx) = L->plant.f(L->xs(xi), u);
    out.segment(l.xo(), l.no) = L->obs.flow(L->xo(xi), L->y(xi), u);
    return out;
  };

  for (std::size_t i = 0; i < obs.branches.size(); ++i) {
    sys.jumps.push_back({obs.branches[i].id,
                         [L, i](const VecRef& xi) {
                           return L->obs.branches[i].guard(L->xo(xi), L->y(xi), L->u(xi));
                         },
                         [L, i](const VecRef& xi) {
                           Vec out = xi;
                           out.segment(L->lay.xo(), L->lay.no) =
                               L->obs.branches[i].map(L->xo(xi), L->y(xi), L->u(xi));
                           return out;
                         }});
  }

  auto add_triggers = [&](TriggerClass cls) {
    for (std::size_t i = 0; i < syn.triggers.size(); ++i) {
      if (syn.triggers[i].cls != cls) continue;
      sys.jumps.push_back({syn.triggers[i].id,
                           [L, i](const VecRef& xi) {
                             return L->syn.triggers[i].guard(L->xs(xi), L->u(xi), L->xhat(xi));
                           },
                           [L, i](const VecRef& xi) {
                             // xhat is taken from the pre-jump state
                             Vec out = xi;
                             out.segment(L->lay.xs(), L->lay.nx) = L->syn.reset(L->xhat(xi));
                             if (const auto& upd = L->syn.triggers[i].observer_update) {
                               out.segment(L->lay.xo(), L->lay.no) = upd(L->xo(xi));
                             }
                             return out;
                           }});
    }
  };
  add_triggers(TriggerClass::Transmission);
  add_triggers(TriggerClass::Timer);

  if (ctrl.guard) {
    sys.jumps.push_back({ctrl.id,
                         [L](const VecRef& xi) { return L->ctrl.guard(L->xc(xi), L->xs(xi)); },
                         [L](const VecRef& xi) {
                           Vec out = xi;
                           out.segment(L->lay.xc(), L->lay.nc) = L->ctrl.jump(L->xc(xi), L->xs(xi));
                           return out;
                         }});
  }
  set_margin_from_guards(sys);

  if (plant.project || obs.project) {
    sys.projector = [L](const VecRef& xi) {
      Vec out = xi;
      if (L->plant.project) {
        out.segment(L->lay.x(), L->lay.nx) = L->plant.project(L->x(xi));
        out.segment(L->lay.xs(), L->lay.nx) = L->plant.project(L->xs(xi));
      }
      if (L->obs.project) out.segment(L->lay.xo(), L->lay.no) = L->obs.project(L->xo(xi));
      return out;
    };
  }

  auto& mask = sys.disturbance_mask;
  mask.assign(static_cast<std::size_t>(lay.nx), true);
  const auto cm = mask_or_default(ctrl.discrete, lay.nc);
  mask.insert(mask.end(), cm.begin(), cm.end());
  mask.insert(mask.end(), static_cast<std::size_t>(lay.nx), true);
  const auto om = mask_or_default(obs.discrete, lay.no);
  mask.insert(mask.end(), om.begin(), om.end());
  return sys;
}

HybridSystemDef perturb(const HybridSystemDef& sys, double rho) {
  if (!(rho >= 0.0)) throw Error(ErrorCode::DomainError, "perturbation magnitude must be nonnegative");
  auto base = std::make_shared<const HybridSystemDef>(sys);
  const int n = sys.dim;
  std::vector<bool> mask = sys.disturbance_mask;
  if (mask.empty()) mask.assign(static_cast<std::size_t>(n), true);
  Vec ones(n);
  for (int i = 0; i < n; ++i) ones[i] = mask[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  auto gain = std::make_shared<const Vec>(std::move(ones));

  HybridSystemDef out;
  out.dim = n + 1;
  out.flow = [base, gain, rho, n](const VecRef& xi) {
    Vec d(n + 1);
    d.head(n) = base->flow(xi.head(n)) + (rho * std::sin(xi[n])) * *gain;
    d[n] = 1.0;
    return d;
  };
  out.flow_margin = [base, n](const VecRef& xi) { return base->flow_margin(xi.head(n)); };
  for (std::size_t i = 0; i < sys.jumps.size(); ++i) {
    out.jumps.push_back({sys.jumps[i].id,
                         [base, i, n](const VecRef& xi) { return base->jumps[i].guard(xi.head(n)); },
                         [base, i, n](const VecRef& xi) {
                           Vec next(n + 1);
                           next.head(n) = base->jumps[i].map(xi.head(n));
                           next[n] = xi[n];
                           return next;
                         }});
  }
  if (sys.projector) {
    out.projector = [base, n](const VecRef& xi) {
      Vec next(n + 1);
      next.head(n) = base->projector(xi.head(n));
      next[n] = xi[n];
      return next;
    };
  }
  out.disturbance_mask = mask;
  out.disturbance_mask.push_back(false);
  return out;
}

}  // namespace hyetc::etc
