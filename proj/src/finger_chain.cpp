// Copyright 2026 The slipstop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slipstop/finger_chain.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

namespace {

// Rotation about the joint's zero-configuration axis line.
Eigen::Isometry3d joint_motion(const RevoluteJoint& j) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translate(j.origin);
  t.rotate(Eigen::AngleAxisd(j.angle, j.axis));
  t.translate(-j.origin);
  return t;
}

// Product of exponentials over joints [0, count).
Eigen::Isometry3d chain_transform(const std::vector<RevoluteJoint>& joints,
                                  int count) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < count; ++i) t = t * joint_motion(joints[i]);
  return t;
}

}  // namespace

void FingerChain::validate() const {
  for (const auto& j : joints) {
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw DegenerateInput("joint axis must be a unit vector");
    }
    if (!(j.tau_min <= j.tau_max)) {
      throw DegenerateInput("joint torque limits must satisfy min <= max");
    }
  }
}

Vec3 FingerChain::current_axis(int j) const {
  return chain_transform(joints, j).linear() * joints[j].axis;
}

Vec3 FingerChain::current_origin(int j) const {
  return chain_transform(joints, j) * joints[j].origin;
}

Vec3 FingerChain::point_forward(int phalanx, const Vec3& p_zero) const {
  return chain_transform(joints, phalanx + 1) * p_zero;
}

Vec3 FingerChain::point_to_zero_config(int phalanx, const Vec3& p_world) const {
  return chain_transform(joints, phalanx + 1).inverse() * p_world;
}

Eigen::Matrix3Xd FingerChain::point_jacobian(int phalanx,
                                             const Vec3& p_world) const {
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, joint_count());
  for (int j = 0; j <= phalanx; ++j) {
    jac.col(j) = current_axis(j).cross(p_world - current_origin(j));
  }
  return jac;
}

FingerChain FingerChain::with_angles(const Eigen::VectorXd& q) const {
  if (q.size() != joint_count()) {
    throw DimensionMismatch("angle vector size does not match joint count");
  }
  FingerChain out = *this;
  for (int j = 0; j < joint_count(); ++j) out.joints[j].angle = q[j];
  return out;
}

}  // namespace slipstop
