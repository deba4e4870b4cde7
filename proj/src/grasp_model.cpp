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

#include "slipstop/grasp_model.hpp"

#include <algorithm>
#include <string>

#include "slipstop/errors.hpp"

namespace slipstop {

Eigen::MatrixXd build_grasp_matrix(const std::vector<Contact>& contacts,
                                   const Pose& object_frame) {
  if (contacts.empty()) {
    throw EmptyContactSet("grasp matrix needs at least one contact");
  }
  const int n = static_cast<int>(contacts.size());
  Eigen::MatrixXd g(6, 3 * n);
  const Mat3 rt = object_frame.rotation.transpose();
  for (int i = 0; i < n; ++i) {
    const Contact& c = contacts[i];
    c.validate();
    const Vec3 arm = c.position - object_frame.origin;
    const Mat3 frame = c.frame();
    for (int d = 0; d < 3; ++d) {
      const Vec3 dir = frame.col(d);
      g.block<3, 1>(0, 3 * i + d) = rt * dir;
      g.block<3, 1>(3, 3 * i + d) = rt * arm.cross(dir);
    }
  }
  return g;
}

Eigen::MatrixXd build_hand_jacobian(const std::vector<FingerChain>& chains,
                                    const std::vector<Contact>& contacts) {
  int m = 0;
  for (const auto& ch : chains) m += ch.joint_count();
  const int n = static_cast<int>(contacts.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * n, m);

  for (int i = 0; i < n; ++i) {
    const Contact& c = contacts[i];
    int col0 = 0;
    const FingerChain* chain = nullptr;
    for (const auto& ch : chains) {
      if (ch.finger_id == c.finger_id) {
        chain = &ch;
        break;
      }
      col0 += ch.joint_count();
    }
    if (chain == nullptr) {
      throw UnknownFinger("contact references finger_id " +
                          std::to_string(c.finger_id) +
                          " with no such chain");
    }
    if (c.phalanx_id < 0 || c.phalanx_id >= chain->joint_count()) {
      throw UnknownPhalanx("contact references phalanx_id " +
                           std::to_string(c.phalanx_id) + " outside chain " +
                           std::to_string(c.finger_id));
    }
    // Point Jacobian rotated into the contact frame so rows line up with
    // the grasp matrix's [n, t1, t2] force components.
    const Eigen::Matrix3Xd jp = chain->point_jacobian(c.phalanx_id, c.position);
    jac.block(3 * i, col0, 3, chain->joint_count()) =
        c.frame().transpose() * jp;
  }
  return jac;
}

std::vector<double> cone_margin(const ContactForceVector& f,
                                const std::vector<Contact>& contacts) {
  const int n = static_cast<int>(contacts.size());
  if (f.size() != 3 * n) {
    throw DimensionMismatch("force vector length does not match contacts");
  }
  std::vector<double> margins(n);
  for (int i = 0; i < n; ++i) {
    const double fn = f[3 * i];
    const double ft = std::hypot(f[3 * i + 1], f[3 * i + 2]);
    margins[i] = contacts[i].mu * fn - ft;
  }
  return margins;
}

Eigen::Matrix<double, 6, 1> object_wrench(const Eigen::MatrixXd& grasp_matrix,
                                          const ContactForceVector& f) {
  if (grasp_matrix.rows() != 6 || grasp_matrix.cols() != f.size()) {
    throw DimensionMismatch("grasp matrix is " +
                            std::to_string(grasp_matrix.rows()) + "x" +
                            std::to_string(grasp_matrix.cols()) +
                            ", force vector has " + std::to_string(f.size()) +
                            " entries");
  }
  return grasp_matrix * f;
}

GraspModel GraspModel::build(std::vector<Contact> contacts,
                             const std::vector<FingerChain>& chains,
                             const Pose& object_frame, double timestamp) {
  std::sort(contacts.begin(), contacts.end(),
            [](const Contact& a, const Contact& b) {
              return a.finger_id != b.finger_id ? a.finger_id < b.finger_id
                                                : a.phalanx_id < b.phalanx_id;
            });
  for (const auto& ch : chains) ch.validate();
  GraspModel model;
  model.grasp_matrix = build_grasp_matrix(contacts, object_frame);
  model.hand_jacobian = build_hand_jacobian(chains, contacts);
  model.contacts = std::move(contacts);
  model.object_frame = object_frame;
  model.timestamp = timestamp;
  return model;
}

}  // namespace slipstop
