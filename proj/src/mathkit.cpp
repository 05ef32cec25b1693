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

#include "hyetc/mathkit.hpp"

#include <cmath>

namespace hyetc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::LeftCandD: return "LeftCandD";
    case ErrorCode::ZenoGuard: return "ZenoGuard";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::SingularFusion: return "SingularFusion";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingDependency: return "MissingDependency";
  }
  return "Unknown";
}

}  // namespace hyetc

namespace hyetc::math {

namespace {

inline double spow(double v, double beta) {
  if (v == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(v), beta), v);
}

void check_exponent(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::DomainError,
                "sign-power exponent must lie in (0,1), got " + std::to_string(beta));
  }
}

}  // namespace

Quaternion Quaternion::normalized() const {
  const double s = norm();
  return {n / s, e / s};
}

Vec sign_power(const VecRef& v, double beta) {
  check_exponent(beta);
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = spow(v[i], beta);
  return out;
}

Vec3 sign_power3(const Vec3& v, double beta) {
  check_exponent(beta);
  return {spow(v[0], beta), spow(v[1], beta), spow(v[2], beta)};
}

Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.n * b.n - a.e.dot(b.e), a.n * b.e + b.n * a.e + a.e.cross(b.e)};
}

Quaternion quat_conj(const Quaternion& q) { return {q.n, -q.e}; }

Mat43 emat(const Quaternion& q) {
  Mat43 m;
  m.row(0) = -0.5 * q.e.transpose();
  // n I + S(e), S(e) w = e x w
  m.bottomRows<3>() << q.n, -q.e[2], q.e[1],
                       q.e[2], q.n, -q.e[0],
                       -q.e[1], q.e[0], q.n;
  m.bottomRows<3>() *= 0.5;
  return m;
}

Vec3 phi_beta(const Quaternion& q, double beta) {
  const double e2 = q.e.squaredNorm();
  // n rounds to 1 long before e vanishes; decide on e alone
  if (e2 == 0.0) return Vec3::Zero();
  const double gap = q.n > 0.0 ? 2.0 * e2 / (1.0 + q.n) : 2.0 - 2.0 * q.n;
  return q.e * std::pow(gap, -0.5 * beta);
}

double interval_dist2(double v, double lo, double hi) {
  if (v < lo) return (lo - v) * (lo - v);
  if (v > hi) return (v - hi) * (v - hi);
  return 0.0;
}

double diagonal_dist2(std::initializer_list<VecRef> parts) {
  if (parts.size() == 0) return 0.0;
  Vec mean = Vec::Zero(parts.begin()->size());
  for (const auto& p : parts) mean += p;
  mean /= static_cast<double>(parts.size());
  double acc = 0.0;
  for (const auto& p : parts) acc += (p - mean).squaredNorm();
  return acc;
}

double unit_diagonal_dist2(std::initializer_list<VecRef> parts) {
  if (parts.size() == 0) return 0.0;
  Vec sum = Vec::Zero(parts.begin()->size());
  for (const auto& p : parts) sum += p;
  const double s = sum.norm();
  double acc = 0.0;
  if (s == 0.0) {
    // every unit point is a minimizer
    for (const auto& p : parts) acc += p.squaredNorm() + 1.0;
    return acc;
  }
  const Vec center = sum / s;
  for (const auto& p : parts) acc += (p - center).squaredNorm();
  return acc;
}

}  // namespace hyetc::math
