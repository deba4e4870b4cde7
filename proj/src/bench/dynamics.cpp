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

#include "slipstop/bench/dynamics.hpp"

#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

double eval_profile(const std::vector<TractionKnot>& knots, double t) {
  if (knots.empty()) throw DegenerateInput("empty traction profile");
  if (t <= knots.front().t_s) return knots.front().force_n;
  if (t >= knots.back().t_s) return knots.back().force_n;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].t_s) {
      const double span = knots[i].t_s - knots[i - 1].t_s;
      if (span <= 0.0) return knots[i].force_n;
      const double u = (t - knots[i - 1].t_s) / span;
      return knots[i - 1].force_n +
             u * (knots[i].force_n - knots[i - 1].force_n);
    }
  }
  return knots.back().force_n;
}

ContactForceVector share_traction(const ContactForceVector& commanded,
                                  const std::vector<Contact>& contacts,
                                  double traction_n,
                                  const Eigen::Vector3d& pull_axis) {
  const int nc = static_cast<int>(contacts.size());
  if (commanded.size() != 3 * nc) {
    throw DimensionMismatch("force vector does not match contact count");
  }
  double total_normal = 0.0;
  for (int i = 0; i < nc; ++i) {
    total_normal += std::max(0.0, commanded[3 * i]);
  }
  ContactForceVector out = commanded;
  for (int i = 0; i < nc; ++i) {
    const double share =
        total_normal > 0.0 ? std::max(0.0, commanded[3 * i]) / total_normal
                           : 1.0 / nc;
    const double demand = traction_n * share;
    // Tangential reaction lies in the contact tangent plane; the pull axis
    // is normal-orthogonal in well-posed scenarios, so projecting onto the
    // tangent vectors loses nothing.
    out[3 * i + 1] += demand * contacts[i].tangent1.dot(pull_axis);
    out[3 * i + 2] += demand * contacts[i].tangent2.dot(pull_axis);
  }
  return out;
}

SimState step_dynamics(const SimState& state,
                       const ContactForceVector& grasp_forces,
                       const std::vector<Contact>& contacts, double traction_n,
                       double dt_s, const SimParams& params) {
  if (!(dt_s > 0.0)) throw DegenerateInput("dt must be positive");
  if (!grasp_forces.allFinite() || !std::isfinite(traction_n) ||
      !std::isfinite(state.object_velocity_mps)) {
    throw NonFiniteState("non-finite input to dynamics step");
  }

  SimState next = state;
  next.clock_s = state.clock_s + dt_s;
  next.traction_n = traction_n;
  next.contact_forces =
      share_traction(grasp_forces, contacts, traction_n, params.pull_axis);

  const std::vector<double> margins = cone_margin(next.contact_forces,
                                                  contacts);
  bool any_violated = false;
  for (double m : margins) {
    if (m < 0.0) {
      any_violated = true;
      break;
    }
  }

  double v = state.object_velocity_mps;
  if (v == 0.0 && !any_violated) {
    // Stick: every contact inside its cone, nothing to integrate.
    next.object_velocity_mps = 0.0;
  } else {
    double kinetic_capacity = 0.0;
    for (std::size_t i = 0; i < contacts.size(); ++i) {
      kinetic_capacity += params.mu_kinetic_ratio * contacts[i].mu *
                          std::max(0.0, next.contact_forces[3 * i]);
    }
    const double net = traction_n - kinetic_capacity;  // forward pull only
    v += dt_s * net / params.object_mass_kg;
    if (v < 0.0) v = 0.0;  // kinetic friction cannot reverse the slide
    next.object_velocity_mps = v;
    next.object_position_m = state.object_position_m + dt_s * v;
  }
  next.slipping = std::abs(next.object_velocity_mps) > params.v_eps_mps;

  if (!std::isfinite(next.object_velocity_mps) ||
      !std::isfinite(next.object_position_m)) {
    throw NonFiniteState("dynamics produced a non-finite state");
  }
  return next;
}

ContactForceVector map_torques_to_contact_forces(
    const Eigen::VectorXd& tau_cmd, const Eigen::VectorXd& tau_base,
    const GraspModel& model, const InternalForceProfile& profile,
    const ContactForceVector& baseline_forces, double alpha) {
  if (baseline_forces.size() != 3 * model.contact_count() ||
      profile.direction.size() != baseline_forces.size()) {
    throw DimensionMismatch("force vectors do not match the model");
  }
  const Eigen::MatrixXd jt = model.hand_jacobian.transpose();
  if (tau_cmd.size() != jt.rows() || tau_base.size() != jt.rows()) {
    throw DimensionMismatch("command does not match joint count");
  }
  // Verified against the commanding controller's own base torque: under a
  // re-estimated model J^T * baseline no longer reproduces tau_base, but
  // the increment is always built on the model that issued the command.
  const Eigen::VectorXd expected =
      tau_base + alpha * (jt * profile.direction);
  const double tol = 1e-6 * (1.0 + expected.cwiseAbs().maxCoeff());
  if ((tau_cmd - expected).cwiseAbs().maxCoeff() > tol) {
    throw UnknownDecomposition(
        "command is not tau_base + alpha * J^T * profile for the given alpha");
  }
  return baseline_forces + alpha * profile.direction;
}

}  // namespace slipstop
