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

#ifndef SLIPSTOP_GRASP_MODEL_HPP
#define SLIPSTOP_GRASP_MODEL_HPP

#include <Eigen/Dense>
#include <vector>

#include "slipstop/contact.hpp"
#include "slipstop/finger_chain.hpp"
#include "slipstop/geometry.hpp"

namespace slipstop {

/// Grasp matrix, 6 x 3N_c. Rows: object-frame force then torque. The column
/// for direction d at contact i is [R^T d; R^T((p_i - c) x d)] with (c, R)
/// the object frame; per-contact column order [normal, t1, t2], contacts in
/// finger_id order. Force rows are dimensionless multipliers of newtons,
/// torque rows carry meters.
Eigen::MatrixXd build_grasp_matrix(const std::vector<Contact>& contacts,
                                   const Pose& object_frame);

/// Hand Jacobian, 3N_c x m: joint rates to contact-point linear velocities
/// expressed in each contact's frame (rows ordered [normal, t1, t2] per
/// contact, matching the grasp matrix columns), so tau = J^T f_c holds with
/// stacked contact-frame forces. Columns for joints distal to a contact's
/// phalanx are zero. Throws UnknownFinger/UnknownPhalanx when a contact
/// does not resolve to a chain link.
Eigen::MatrixXd build_hand_jacobian(const std::vector<FingerChain>& chains,
                                    const std::vector<Contact>& contacts);

/// Per-contact friction-cone margin mu_i*f_n_i - ||f_t_i||. Positive means
/// strictly inside the cone, zero on the boundary, negative is a sliding
/// demand. A negative normal force is reported as a negative margin, not
/// rejected.
std::vector<double> cone_margin(const ContactForceVector& f,
                                const std::vector<Contact>& contacts);

/// Net object wrench G*f (N, N*m). Throws DimensionMismatch.
Eigen::Matrix<double, 6, 1> object_wrench(const Eigen::MatrixXd& grasp_matrix,
                                          const ContactForceVector& f);

// The grasp model for one contact set: geometry, G, J, and the frame the
// wrench is expressed in. Immutable after construction; rebuild on contact
// updates.
struct GraspModel {
  std::vector<Contact> contacts;      // sorted by (finger_id, phalanx_id)
  Eigen::MatrixXd grasp_matrix;       // 6 x 3N_c
  Eigen::MatrixXd hand_jacobian;      // 3N_c x m
  Pose object_frame;
  double timestamp = 0.0;             // simulated s of the geometry snapshot

  int contact_count() const { return static_cast<int>(contacts.size()); }
  int joint_count() const {
    return static_cast<int>(hand_jacobian.cols());
  }

  // Builds G and J from validated inputs; contacts are canonically sorted
  // by (finger_id, phalanx_id) so bases and profiles are reproducible.
  static GraspModel build(std::vector<Contact> contacts,
                          const std::vector<FingerChain>& chains,
                          const Pose& object_frame, double timestamp = 0.0);
};

}  // namespace slipstop

#endif  // SLIPSTOP_GRASP_MODEL_HPP
