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

#include "slipstop/geometry.hpp"

#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

std::pair<Vec3, Vec3> build_contact_frame(const Vec3& normal) {
  const double norm = normal.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
    throw NonUnitNormal("contact normal must be unit length, got norm " +
                        std::to_string(norm));
  }
  // Axis least aligned with the normal, lowest index on ties.
  int axis = 0;
  double best = std::abs(normal.x());
  if (std::abs(normal.y()) < best) {
    axis = 1;
    best = std::abs(normal.y());
  }
  if (std::abs(normal.z()) < best) {
    axis = 2;
  }
  const Vec3 seed = Vec3::Unit(axis);
  Vec3 t1 = seed - seed.dot(normal) * normal;
  t1.normalize();
  const Vec3 t2 = normal.cross(t1);  // t1 x t2 = normal
  return {t1, t2};
}

}  // namespace slipstop
