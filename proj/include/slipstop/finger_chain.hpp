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

#ifndef SLIPSTOP_FINGER_CHAIN_HPP
#define SLIPSTOP_FINGER_CHAIN_HPP

#include <vector>

#include "slipstop/geometry.hpp"

namespace slipstop {

// One revolute joint of a serial finger. Axis and origin are given at the
// chain's zero configuration, in the world frame; the current placement
// follows from the preceding joints' angles (product of exponentials).
struct RevoluteJoint {
  Vec3 axis = Vec3::UnitZ();    // unit, zero configuration
  Vec3 origin = Vec3::Zero();   // m, zero configuration
  double angle = 0.0;           // rad
  double tau_min = -1.0;        // N*m
  double tau_max = 1.0;         // N*m
};

// Serial revolute finger. Link i is the body between joint i and joint i+1
// (the fingertip link for the last joint); a contact on phalanx p moves
// with joints 0..p and is unaffected by more distal joints.
struct FingerChain {
  int finger_id = 0;
  std::vector<RevoluteJoint> joints;
  std::vector<double> link_lengths;  // m, optional bookkeeping from presets

  int joint_count() const { return static_cast<int>(joints.size()); }

  // Validates unit axes (1e-9) and tau_min <= tau_max per joint.
  void validate() const;

  // Placement of joint j's axis/origin at the current angles (applies
  // joints 0..j-1).
  Vec3 current_axis(int j) const;
  Vec3 current_origin(int j) const;

  // Maps a point attached to link `phalanx` from its zero-configuration
  // position to the current configuration, and back. Used by the
  // finite-difference test oracle and by scenario setup.
  Vec3 point_forward(int phalanx, const Vec3& p_zero) const;
  Vec3 point_to_zero_config(int phalanx, const Vec3& p_world) const;

  // Geometric point Jacobian (3 x joint_count, world frame) of a point on
  // `phalanx`: column j = axis_j x (p - origin_j) for j <= phalanx, zero
  // for distal joints.
  Eigen::Matrix3Xd point_jacobian(int phalanx, const Vec3& p_world) const;

  // Copy with joint angles replaced (size must match joint_count).
  FingerChain with_angles(const Eigen::VectorXd& q) const;
};

}  // namespace slipstop

#endif  // SLIPSTOP_FINGER_CHAIN_HPP
