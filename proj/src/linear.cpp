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

#include "hyetc/linear.hpp"

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>

namespace hyetc::linear {

namespace {

using json = nlohmann::json;
using CMat = Eigen::MatrixXcd;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::ConfigError, "linear config: " + what);
}

Mat matrix_from_json(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing key '") + key + "'");
  const json& rows = j.at(key);
  if (!rows.is_array() || rows.empty()) fail(std::string("'") + key + "' must be a nonempty array of rows");
  const std::size_t ncols = rows[0].is_array() ? rows[0].size() : 0;
  if (ncols == 0) fail(std::string("'") + key + "' rows must be nonempty arrays");
  Mat m(rows.size(), ncols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != ncols) fail(std::string("'") + key + "' is ragged");
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!rows[r][c].is_number()) fail(std::string("'") + key + "' has a non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

double max_real_eig(const Mat& M) {
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Mat>(M, false).eigenvalues();
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) worst = std::max(worst, ev[i].real());
  return worst;
}

int numeric_rank(const CMat& M) {
  Eigen::JacobiSVD<CMat> svd(M);
  const auto& s = svd.singularValues();
  const double tol = std::max(M.rows(), M.cols()) * s[0] * 1e-10;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > tol ? 1 : 0;
  return r;
}

// PBH test at every eigenvalue with nonnegative real part.
bool pbh_ok(const Mat& A, const Mat& W, bool columns) {
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Mat>(A, false).eigenvalues();
  const auto n = A.rows();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i].real() < 0.0) continue;
    const CMat shifted = A.cast<std::complex<double>>() - ev[i] * CMat::Identity(n, n);
    CMat test;
    if (columns) {
      test.resize(n, n + W.cols());
      test << shifted, W.cast<std::complex<double>>();
    } else {
      test.resize(n + W.rows(), n);
      test << shifted, W.cast<std::complex<double>>();
    }
    if (numeric_rank(test) < n) return false;
  }
  return true;
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

void LinearConfig::validate() const {
  const auto n = A.rows();
  if (n == 0 || A.cols() != n) fail("A must be square and nonempty");
  if (B.rows() != n || B.cols() == 0) fail("B must have as many rows as A");
  if (C.cols() != n || C.rows() == 0) fail("C must have as many columns as A");
  if (K.rows() != B.cols() || K.cols() != n) fail("K must be n_u x n_x");
  if (L1.rows() != n || L1.cols() != C.rows()) fail("L1 must be n_x x n_y");
  if (L2.rows() != n || L2.cols() != C.rows()) fail("L2 must be n_x x n_y");
  if (!(h_c > 0.0)) fail("h_c must be positive");
  if (!(d_obs > 0.0)) fail("d_obs must be positive");
  if (!(delta > 0.0)) fail("delta must be positive");
  if (!(tau_bar > 0.0)) fail("tau_bar must be positive");
  if (!(rho >= 0.0)) fail("rho must be nonnegative");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (x0 && x0->size() != n) fail("x0 must have n_x entries");
  if (!pbh_ok(A, B, true)) fail("(A, B) is not stabilizable");
  if (!pbh_ok(A, C, false)) fail("(A, C) is not detectable");
  if (max_real_eig(A - L1 * C) >= 0.0) fail("A - L1 C is not Hurwitz");
  if (max_real_eig(A - L2 * C) >= 0.0) fail("A - L2 C is not Hurwitz");
  fusion_matrices(*this);
  if (sampled_spectral_radius(A, B, K, h_c) >= 1.0) fail("sampled-data loop with gain K and period h_c is not stable");
}

LinearConfig parse_linear_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  LinearConfig cfg;
  cfg.name = j.value("name", std::string("linear"));
  cfg.A = matrix_from_json(j, "A");
  cfg.B = matrix_from_json(j, "B");
  cfg.C = matrix_from_json(j, "C");
  cfg.K = matrix_from_json(j, "K");
  cfg.L1 = matrix_from_json(j, "L1");
  cfg.L2 = matrix_from_json(j, "L2");
  cfg.h_c = get_number(j, "h_c", cfg.h_c);
  cfg.d_obs = get_number(j, "d_obs", cfg.d_obs);
  cfg.delta = get_number(j, "delta", cfg.delta);
  cfg.tau_bar = get_number(j, "tau_bar", cfg.tau_bar);
  cfg.rho = get_number(j, "rho", cfg.rho);
  cfg.dt = get_number(j, "dt", cfg.dt);
  cfg.x0_scale = get_number(j, "x0_scale", cfg.x0_scale);
  if (j.contains("x0")) {
    const auto& v = j.at("x0");
    if (!v.is_array()) fail("'x0' must be an array");
    Vec x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail("'x0' has a non-numeric entry");
      x[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    cfg.x0 = x;
  }
  cfg.validate();
  return cfg;
}

LinearConfig load_linear_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_linear_config(ss.str());
}

std::string to_json_text(const LinearConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["A"] = matrix_to_json(cfg.A);
  j["B"] = matrix_to_json(cfg.B);
  j["C"] = matrix_to_json(cfg.C);
  j["K"] = matrix_to_json(cfg.K);
  j["L1"] = matrix_to_json(cfg.L1);
  j["L2"] = matrix_to_json(cfg.L2);
  j["h_c"] = cfg.h_c;
  j["d_obs"] = cfg.d_obs;
  j["delta"] = cfg.delta;
  j["tau_bar"] = cfg.tau_bar;
  j["rho"] = cfg.rho;
  j["dt"] = cfg.dt;
  j["x0_scale"] = cfg.x0_scale;
  if (cfg.x0) j["x0"] = std::vector<double>(cfg.x0->data(), cfg.x0->data() + cfg.x0->size());
  return j.dump(2);
}

LinearConfig batch_reactor_config() {
  LinearConfig c;
  c.name = "batch_reactor";
  c.A.resize(4, 4);
  c.A << 1.38, -0.2077, 6.715, -5.676,
         -0.5814, -4.29, 0.0, 0.675,
         1.067, 4.273, -6.654, 5.893,
         0.048, 4.273, 1.343, -2.104;
  c.B.resize(4, 2);
  c.B << 0.0, 0.0,
         5.679, 0.0,
         1.136, -3.146,
         1.136, 0.0;
  c.C.resize(2, 4);
  c.C << 1.0, 0.0, 1.0, -1.0,
         0.0, 1.0, 0.0, 0.0;
  // continuous LQR, Q = I, R = I
  c.K.resize(2, 4);
  c.K << -0.0532, -0.9421, -0.3513, -0.8411,
         2.5325, 0.0716, 1.7794, -1.1645;
  // observer poles {-2, -2.5, -3, -3.5} and {-4, -4.5, -5, -5.5}
  c.L1.resize(4, 2);
  c.L1 << 7.5196, -1.847,
          0.2184, -1.0809,
          -5.2885, 14.8146,
          1.8182, 6.004;
  c.L2.resize(4, 2);
  c.L2 << 7.2474, 3.2503,
          0.3356, 2.4719,
          1.2948, 22.1685,
          3.682, 18.0628;
  c.h_c = 0.05;
  c.d_obs = 1.0;
  c.delta = 0.1;
  c.tau_bar = 10.0;
  return c;
}

LinearConfig double_integrator_config() {
  LinearConfig c;
  c.name = "double_integrator";
  c.A.resize(2, 2);
  c.A << 0.0, 1.0, 0.0, 0.0;
  c.B.resize(2, 1);
  c.B << 0.0, 1.0;
  c.C.resize(1, 2);
  c.C << 1.0, 0.0;
  c.K.resize(1, 2);
  c.K << -1.0, -std::sqrt(3.0);
  c.L1.resize(2, 1);
  c.L1 << 2.0, 1.0;
  c.L2.resize(2, 1);
  c.L2 << 4.0, 4.0;
  c.h_c = 0.05;
  c.d_obs = 1.0;
  c.delta = 0.1;
  c.tau_bar = 10.0;
  return c;
}

FusionMatrices fusion_matrices(const Mat& F1, const Mat& F2, double d) {
  const Mat E1 = (F1 * d).exp();
  const Mat E2 = (F2 * d).exp();
  const Mat D = E1 - E2;
  Eigen::JacobiSVD<Mat> svd(D);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  FusionMatrices fm;
  fm.condition = smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
  if (!(fm.condition <= 1e12)) {
    throw Error(ErrorCode::SingularFusion,
                "fusion matrix e^{F1 d} - e^{F2 d} is numerically singular (condition " +
                    std::to_string(fm.condition) + ")");
  }
  fm.gain = E1 * D.inverse();
  fm.decay2 = E2;
  return fm;
}

FusionMatrices fusion_matrices(const LinearConfig& cfg) {
  return fusion_matrices(cfg.A - cfg.L1 * cfg.C, cfg.A - cfg.L2 * cfg.C, cfg.d_obs);
}

Vec fuse_finite_time(const FusionMatrices& fm, const VecRef& z1, const VecRef& z2, const VecRef& m) {
  return z1 - fm.gain * ((z1 - z2) - fm.decay2 * m);
}

double sampled_spectral_radius(const Mat& A, const Mat& B, const Mat& K, double h) {
  const auto n = A.rows();
  const auto nu = B.cols();
  Mat aug = Mat::Zero(n + nu, n + nu);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, nu) = B;
  const Mat E = (aug * h).exp();
  const Mat loop = E.topLeftCorner(n, n) + E.topRightCorner(n, nu) * K;
  return Eigen::EigenSolver<Mat>(loop, false).eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

enum class ObserverKind { Fusion, Luenberger };

struct Model {
  LinearConfig cfg;
  FusionMatrices fm;
  int nx, nu, ny;
};

etc::PlantDef plant(const std::shared_ptr<const Model>& M) {
  etc::PlantDef p;
  p.nx = M->nx;
  p.nu = M->nu;
  p.ny = M->ny;
  p.f = [M](const VecRef& x, const VecRef& u) -> Vec { return M->cfg.A * x + M->cfg.B * u; };
  p.h = [M](const VecRef& x) -> Vec { return M->cfg.C * x; };
  return p;
}

etc::ControllerDef sampler(const std::shared_ptr<const Model>& M) {
  const int nu = M->nu;
  etc::ControllerDef c;
  c.id = kControllerTick;
  c.nc = nu + 1;
  c.nx = M->nx;
  c.nu = nu;
  c.flow = [nu](const VecRef&, const VecRef&) {
    Vec d = Vec::Zero(nu + 1);
    d[nu] = 1.0;
    return d;
  };
  c.guard = [M, nu](const VecRef& xc, const VecRef&) { return xc[nu] - M->cfg.h_c; };
  c.jump = [M, nu](const VecRef&, const VecRef& x) {
    Vec out(nu + 1);
    out.head(nu) = M->cfg.K * x;
    out[nu] = 0.0;
    return out;
  };
  c.kappa = [nu](const VecRef& xc, const VecRef&) -> Vec { return xc.head(nu); };
  c.discrete.assign(static_cast<std::size_t>(nu + 1), true);
  c.discrete[static_cast<std::size_t>(nu)] = false;
  return c;
}

// x_o = (z1, z2, m, tau_o, armed, tau_w)
etc::ObserverDef observer(const std::shared_ptr<const Model>& M, ObserverKind kind) {
  const int n = M->nx;
  etc::ObserverDef o;
  o.no = 3 * n + 3;
  o.ny = M->ny;
  o.nu = M->nu;
  o.nxhat = n + 1;
  const bool fusion = kind == ObserverKind::Fusion;
  o.flow = [M, n, fusion](const VecRef& xo, const VecRef& y, const VecRef& u) {
    const auto& c = M->cfg;
    Vec d = Vec::Zero(3 * n + 3);
    const auto z1 = xo.segment(0, n);
    const auto z2 = xo.segment(n, n);
    d.segment(0, n) = c.A * z1 + c.B * u + c.L1 * (y - c.C * z1);
    if (fusion) {
      d.segment(n, n) = c.A * z2 + c.B * u + c.L2 * (y - c.C * z2);
      d[3 * n] = 1.0;
    } else {
      d.segment(n, n) = d.segment(0, n);  // z2 shadows z1
    }
    d[3 * n + 2] = 1.0;
    return d;
  };
  if (fusion) {
    o.branches.push_back({kFusion,
                          [M, n](const VecRef& xo, const VecRef&, const VecRef&) {
                            return xo[3 * n] - M->cfg.d_obs;
                          },
                          [M, n](const VecRef& xo, const VecRef&, const VecRef&) {
                            Vec out = xo;
                            const auto z1 = xo.segment(0, n);
                            const auto z2 = xo.segment(n, n);
                            if (xo[3 * n + 1] > 0.5) {
                              const Vec xhat = fuse_finite_time(M->fm, z1, z2, xo.segment(2 * n, n));
                              out.segment(0, n) = xhat;
                              out.segment(n, n) = xhat;
                              out.segment(2 * n, n).setZero();
                            } else {
                              out.segment(2 * n, n) = z1 - z2;
                              out[3 * n + 1] = 1.0;
                            }
                            out[3 * n] = 0.0;
                            return out;
                          }});
  }
  o.output = [n](const VecRef& xo, const VecRef&) {
    Vec xhat(n + 1);
    xhat << xo.segment(0, n), xo[3 * n + 2];
    return xhat;
  };
  // memory registers (m, armed) are not disturbed
  o.discrete.assign(static_cast<std::size_t>(3 * n + 3), false);
  for (int i = 2 * n; i < 3 * n; ++i) o.discrete[static_cast<std::size_t>(i)] = true;
  o.discrete[static_cast<std::size_t>(3 * n + 1)] = true;
  return o;
}

etc::SyntheticDef synthetic(int n, bool deviation, double delta, double period) {
  etc::SyntheticDef s;
  s.nx = n;
  s.nxhat = n + 1;
  s.reset = [n](const VecRef& xhat) -> Vec { return xhat.head(n); };
  if (deviation) {
    s.triggers.push_back({kTransmit, etc::TriggerClass::Transmission,
                          [n, delta](const VecRef& xs, const VecRef&, const VecRef& xhat) {
                            return (xs - xhat.head(n)).norm() - delta;
                          },
                          nullptr});
  }
  s.triggers.push_back({kWatchdog, etc::TriggerClass::Timer,
                        [n, period](const VecRef&, const VecRef&, const VecRef& xhat) {
                          return xhat[n] - period;
                        },
                        [n](const VecRef& xo) {
                          Vec out = xo;
                          out[3 * n + 2] = 0.0;
                          return out;
                        }});
  return s;
}

Scenario assemble(const LinearConfig& cfg, ObserverKind kind, bool deviation, double period) {
  cfg.validate();
  auto M = std::make_shared<const Model>(Model{cfg, fusion_matrices(cfg), cfg.nx(), cfg.nu(), cfg.ny()});
  Scenario sc;
  sc.system = etc::compose_closed_loop(plant(M), sampler(M), observer(M, kind),
                                       synthetic(cfg.nx(), deviation, cfg.delta, period));
  if (cfg.rho > 0.0) sc.system = etc::perturb(sc.system, cfg.rho);
  sc.sets = target_sets(cfg, period);
  sc.layout = etc::Layout{cfg.nx(), cfg.nu() + 1, 3 * cfg.nx() + 3};
  sc.transmission_branches = {kWatchdog};
  if (deviation) sc.transmission_branches.insert(sc.transmission_branches.begin(), kTransmit);
  sc.dt = cfg.dt;
  return sc;
}

}  // namespace

Scenario build_linear_scenario(const LinearConfig& cfg) {
  return assemble(cfg, ObserverKind::Fusion, true, cfg.tau_bar);
}

Scenario make_linear_comparison_variant(Variant kind, const LinearConfig& cfg, std::optional<double> period_b) {
  switch (kind) {
    case Variant::Ours: return build_linear_scenario(cfg);
    case Variant::A: return assemble(cfg, ObserverKind::Luenberger, true, cfg.tau_bar);
    case Variant::B:
      if (!period_b || !(*period_b > 0.0) || !std::isfinite(*period_b)) {
        throw Error(ErrorCode::ConfigError, "variant b needs a positive finite period");
      }
      return assemble(cfg, ObserverKind::Fusion, false, *period_b);
    case Variant::C: return assemble(cfg, ObserverKind::Fusion, false, cfg.h_c / 10.0);
  }
  throw Error(ErrorCode::ConfigError, "unknown variant");
}

hybrid::HybridSystemDef build_nominal(const LinearConfig& cfg) {
  cfg.validate();
  auto M = std::make_shared<const Model>(Model{cfg, fusion_matrices(cfg), cfg.nx(), cfg.nu(), cfg.ny()});
  return etc::compose_nominal(plant(M), sampler(M));
}

Vec initial_state(const LinearConfig& cfg, std::uint64_t seed, InitMode mode) {
  const Index I{cfg.nx(), cfg.nu()};
  Vec x0;
  if (cfg.x0) {
    x0 = *cfg.x0;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-cfg.x0_scale, cfg.x0_scale);
    x0.resize(I.nx);
    for (int i = 0; i < I.nx; ++i) x0[i] = unif(rng);
  }
  Vec xi = Vec::Zero(I.dim());
  xi.segment(I.x(), I.nx) = x0;
  xi[I.tc()] = cfg.h_c;
  xi[I.to()] = cfg.d_obs;
  if (mode == InitMode::ExactSensor) {
    xi.segment(I.xs(), I.nx) = x0;
    xi.segment(I.z1(), I.nx) = x0;
    xi.segment(I.z2(), I.nx) = x0;
  }
  return xi;
}

etc::TargetSets target_sets(const LinearConfig& cfg, double tau_bar) {
  const Index I{cfg.nx(), cfg.nu()};
  const double hc = cfg.h_c;
  const double d = cfg.d_obs;
  etc::TargetSets s;
  s.a0 = [I, hc](const VecRef& xi) {
    return std::sqrt(xi.segment(I.x(), I.nx).squaredNorm() + xi.segment(I.uh(), I.nu).squaredNorm() +
                     math::interval_dist2(xi[I.tc()], 0.0, hc));
  };
  auto timers = [I, hc, d, tau_bar](const VecRef& xi) {
    return math::interval_dist2(xi[I.tc()], 0.0, hc) + math::interval_dist2(xi[I.to()], 0.0, d) +
           math::interval_dist2(xi[I.tw()], 0.0, tau_bar);
  };
  s.as = [I, timers](const VecRef& xi) {
    const double d2 = math::diagonal_dist2({xi.segment(I.x(), I.nx), xi.segment(I.xs(), I.nx),
                                            xi.segment(I.z1(), I.nx), xi.segment(I.z2(), I.nx)}) +
                      xi.segment(I.m(), I.nx).squaredNorm() + timers(xi);
    return std::sqrt(d2);
  };
  s.a = [I, timers](const VecRef& xi) {
    const double d2 = xi.segment(I.x(), I.nx).squaredNorm() + xi.segment(I.uh(), I.nu).squaredNorm() +
                      xi.segment(I.xs(), I.nx).squaredNorm() + xi.segment(I.z1(), I.nx).squaredNorm() +
                      xi.segment(I.z2(), I.nx).squaredNorm() + xi.segment(I.m(), I.nx).squaredNorm() +
                      timers(xi);
    return std::sqrt(d2);
  };
  return s;
}

}  // namespace hyetc::linear
