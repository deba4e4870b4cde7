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

#ifndef SLIPSTOP_GEOMETRY_HPP
#define SLIPSTOP_GEOMETRY_HPP

#include <Eigen/Dense>
#include <utility>

namespace slipstop {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Rigid pose: all library geometry lives in one world frame; a Pose names
// the reference frame used for moment arms (object frame by convention).
struct Pose {
  Vec3 origin = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  Vec3 to_local(const Vec3& p_world) const {
    return rotation.transpose() * (p_world - origin);
  }
};

/// Builds a right-handed orthonormal tangent frame (t1, t2) for a unit
/// normal, with t1 x t2 = normal. Deterministic rule: start from the
/// coordinate axis least aligned with the normal (lowest index on ties),
/// project it onto the tangent plane, normalize; t2 = normal x t1.
/// Throws NonUnitNormal if ||normal|| deviates from 1 by more than 1e-6.
std::pair<Vec3, Vec3> build_contact_frame(const Vec3& normal);

}  // namespace slipstop

#endif  // SLIPSTOP_GEOMETRY_HPP
