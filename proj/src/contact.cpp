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

#include "slipstop/contact.hpp"

#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

Contact Contact::make(const Vec3& position, const Vec3& normal, double mu,
                      int finger_id, int phalanx_id) {
  Contact c;
  c.position = position;
  c.normal = normal.normalized();
  auto [t1, t2] = build_contact_frame(c.normal);
  c.tangent1 = t1;
  c.tangent2 = t2;
  c.mu = mu;
  c.finger_id = finger_id;
  c.phalanx_id = phalanx_id;
  c.validate();
  return c;
}

Mat3 Contact::frame() const {
  Mat3 b;
  b.col(0) = normal;
  b.col(1) = tangent1;
  b.col(2) = tangent2;
  return b;
}

void Contact::validate() const {
  constexpr double kTol = 1e-9;
  const bool units = std::abs(normal.norm() - 1.0) <= kTol &&
                     std::abs(tangent1.norm() - 1.0) <= kTol &&
                     std::abs(tangent2.norm() - 1.0) <= kTol;
  const bool ortho = std::abs(normal.dot(tangent1)) <= kTol &&
                     std::abs(normal.dot(tangent2)) <= kTol &&
                     std::abs(tangent1.dot(tangent2)) <= kTol;
  const bool handed = (tangent1.cross(tangent2) - normal).norm() <= kTol;
  if (!units || !ortho || !handed) {
    throw DegenerateInput("contact frame is not a right-handed orthonormal "
                          "basis with t1 x t2 = normal");
  }
  if (!(mu >= 0.0)) {
    throw DegenerateInput("friction coefficient must be >= 0");
  }
  if (!position.allFinite()) {
    throw DegenerateInput("contact position must be finite");
  }
}

}  // namespace slipstop
