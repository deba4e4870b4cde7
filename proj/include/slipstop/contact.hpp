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

#ifndef SLIPSTOP_CONTACT_HPP
#define SLIPSTOP_CONTACT_HPP

#include <Eigen/Dense>

#include "slipstop/geometry.hpp"

namespace slipstop {

// One point contact under the hard-finger model: a position, a unit normal
// pointing into the object, a right-handed tangent frame (t1 x t2 = normal),
// a static friction coefficient, and the link of the kinematic chain that
// carries it. The per-contact force order everywhere in the library is
// [normal, tangent1, tangent2].
struct Contact {
  Vec3 position = Vec3::Zero();   // m, world frame
  Vec3 normal = Vec3::UnitZ();    // unit, into the object
  Vec3 tangent1 = Vec3::UnitX();  // unit
  Vec3 tangent2 = Vec3::UnitY();  // unit
  double mu = 0.5;                // static friction coefficient, >= 0
  int finger_id = 0;
  int phalanx_id = 0;

  // Convenience: contact with frame derived from the normal.
  static Contact make(const Vec3& position, const Vec3& normal, double mu,
                      int finger_id, int phalanx_id);

  // Frame basis as columns [normal t1 t2]; maps local force components to
  // world vectors.
  Mat3 frame() const;

  // Checks the type invariants (unit/orthonormal frame within 1e-9,
  // right-handedness, mu >= 0). Throws DegenerateInput on violation.
  void validate() const;
};

// Stacked contact forces, newtons, 3 entries per contact ordered
// [f_n, f_t1, f_t2] with contacts in finger_id order.
using ContactForceVector = Eigen::VectorXd;

}  // namespace slipstop

#endif  // SLIPSTOP_CONTACT_HPP
