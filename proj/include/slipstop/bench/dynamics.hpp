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

#ifndef SLIPSTOP_BENCH_DYNAMICS_HPP_
#define SLIPSTOP_BENCH_DYNAMICS_HPP_

#include <Eigen/Dense>
#include <vector>

#include "slipstop/contact.hpp"
#include "slipstop/grasp_model.hpp"
#include "slipstop/qp.hpp"

namespace slipstop {

// Piecewise-linear pull force vs time. Knots must be time-sorted with
// nonnegative forces; the profile holds its endpoint values outside the
// knot range.
struct TractionKnot {
  double t_s = 0.0;
  double force_n = 0.0;
};

double eval_profile(const std::vector<TractionKnot>& knots, double t);

// 1-DoF slide state. The object moves along the pull axis only; velocity
// is zero whenever the ground-truth slipping flag is clear.
struct SimState {
  double object_position_m = 0.0;
  double object_velocity_mps = 0.0;
  ContactForceVector contact_forces;  // commanded + shared tangential load
  double traction_n = 0.0;
  double clock_s = 0.0;
  bool slipping = false;
};

struct SimParams {
  double object_mass_kg = 0.2;
  double mu_kinetic_ratio = 0.8;  // mu_k = ratio * mu_s
  double v_eps_mps = 1e-4;        // ground-truth slipping threshold
  Eigen::Vector3d pull_axis{0.0, 0.0, 1.0};
};

// Distributes the pull force across contacts proportionally to commanded
// normal force (the simplest resolution of the static indeterminacy) and
// returns the total per-contact forces: commanded plus the tangential
// share expressed in each contact frame.
ContactForceVector share_traction(const ContactForceVector& commanded,
                                  const std::vector<Contact>& contacts,
                                  double traction_n,
                                  const Eigen::Vector3d& pull_axis);

// One Coulomb stick-slip step: holds the object while every cone margin is
// nonnegative, otherwise integrates the slide semi-implicitly under
// traction minus kinetic friction, clamping velocity at zero on reversal.
SimState step_dynamics(const SimState& state,
                       const ContactForceVector& grasp_forces,
                       const std::vector<Contact>& contacts, double traction_n,
                       double dt_s, const SimParams& params);

// Inverts a controller command back to contact forces: tau_cmd must equal
// tau_base + alpha * J^T * f0_star up to command clamping, in which case
// the realized forces are baseline + alpha * f0_star.
ContactForceVector map_torques_to_contact_forces(
    const Eigen::VectorXd& tau_cmd, const Eigen::VectorXd& tau_base,
    const GraspModel& model, const InternalForceProfile& profile,
    const ContactForceVector& baseline_forces, double alpha);

}  // namespace slipstop

#endif  // SLIPSTOP_BENCH_DYNAMICS_HPP_
