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

#include "hyetc/common.hpp"

#include <functional>
#include <initializer_list>

namespace hyetc::math {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat43 = Eigen::Matrix<double, 4, 3>;

/// Quaternion q = (n, e) with scalar part n and vector part e. Stored in
/// state vectors as the 4-tuple (n, e1, e2, e3).
struct Quaternion {
  double n = 1.0;
  Vec3 e = Vec3::Zero();

  static Quaternion identity() { return {}; }
  static Quaternion from_vec(const Eigen::Ref<const Vec4>& v) {
    return {v[0], v.tail<3>()};
  }
  [[nodiscard]] Vec4 to_vec() const {
    Vec4 v;
    v << n, e;
    return v;
  }
  [[nodiscard]] double norm() const { return std::sqrt(n * n + e.squaredNorm()); }
  [[nodiscard]] Quaternion normalized() const;
  Quaternion operator-() const { return {-n, -e}; }
  Quaternion operator*(double s) const { return {n * s, e * s}; }
};

/// Componentwise sign(v_i)|v_i|^beta. Throws DomainError unless 0 < beta < 1.
Vec sign_power(const VecRef& v, double beta);
Vec3 sign_power3(const Vec3& v, double beta);

/// (n1 n2 - e1.e2, n1 e2 + n2 e1 + e1 x e2)
Quaternion quat_mul(const Quaternion& a, const Quaternion& b);
Quaternion quat_conj(const Quaternion& q);

/// Kinematics matrix E(q) = 1/2 [-e^T; nI + S(e)], so that dq/dt = E(q) w.
Mat43 emat(const Quaternion& q);

/// phi_beta(q) = e (2 - 2n)^(-beta/2), zero at n = 1.
///
/// On the unit sphere 2 - 2n = 2|e|^2 / (1 + n); that form is used for n > 0
/// so the injection stays accurate when q is within rounding of the identity.
/// For n < 0 the same closed-form expression is evaluated.
Vec3 phi_beta(const Quaternion& q, double beta);

/// Point-to-set distance evaluator: state -> nonnegative real.
using SetDistanceFn = std::function<double(const VecRef&)>;

inline double dist_to_set(const VecRef& xi, const SetDistanceFn& set) { return set(xi); }

/// Squared distance from v to the interval [lo, hi].
double interval_dist2(double v, double lo, double hi);

/// Squared distance from the tuple (v_1..v_k) to the diagonal {v_1 = ... = v_k}.
double diagonal_dist2(std::initializer_list<VecRef> parts);

/// Squared distance from the unit-vector tuple (q_1..q_k) to the diagonal
/// restricted to the unit sphere: sum |q_i|^2 + k - 2 |sum q_i|.
double unit_diagonal_dist2(std::initializer_list<VecRef> parts);

}  // namespace hyetc::math
