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

#include "slipstop/controller.hpp"

#include <algorithm>
#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTimeSlack = 1e-12;  // absorbs dt accumulation rounding
}  // namespace

const char* to_string(ControlMode m) {
  switch (m) {
    case ControlMode::Idle: return "Idle";
    case ControlMode::Slipping: return "Slipping";
    case ControlMode::Reinforcing: return "Reinforcing";
    case ControlMode::Stabilized: return "Stabilized";
    case ControlMode::NotApplicable: return "NotApplicable";
  }
  return "Unknown";
}

Eigen::VectorXd compute_torque_increment(const InternalForceProfile& profile,
                                         double alpha,
                                         const Eigen::MatrixXd& jacobian) {
  if (alpha < 0.0) {
    throw DegenerateInput("reinforcement gain must be nonnegative");
  }
  if (jacobian.rows() != profile.direction.size()) {
    throw DimensionMismatch("jacobian rows do not match the profile length");
  }
  return alpha * (jacobian.transpose() * profile.direction);
}

double cap_alpha(double alpha_request, const InternalForceProfile& profile,
                 const Eigen::MatrixXd& jacobian,
                 const Eigen::VectorXd& tau_base,
                 const Eigen::VectorXd& tau_min,
                 const Eigen::VectorXd& tau_max) {
  if (alpha_request < 0.0) {
    throw DegenerateInput("reinforcement gain must be nonnegative");
  }
  const Eigen::VectorXd demand = compute_torque_increment(profile, 1.0,
                                                          jacobian);
  if (tau_base.size() != demand.size() || tau_min.size() != demand.size() ||
      tau_max.size() != demand.size()) {
    throw DimensionMismatch("torque vectors disagree on joint count");
  }
  double alpha_max = kInf;
  for (int j = 0; j < demand.size(); ++j) {
    if (!(tau_min[j] <= tau_base[j] && tau_base[j] <= tau_max[j])) {
      throw DegenerateInput("baseline torque outside the torque box");
    }
    if (demand[j] > 0.0) {
      alpha_max = std::min(alpha_max, (tau_max[j] - tau_base[j]) / demand[j]);
    } else if (demand[j] < 0.0) {
      alpha_max = std::min(alpha_max, (tau_min[j] - tau_base[j]) / demand[j]);
    }
  }
  return std::min(alpha_request, alpha_max);
}

Controller::Controller(ControllerConfig config, Eigen::VectorXd tau_base,
                       std::vector<FingerChain> chains)
    : config_(std::move(config)), chains_(std::move(chains)) {
  int m = 0;
  for (const auto& ch : chains_) {
    ch.validate();
    m += ch.joint_count();
  }
  if (tau_base.size() != m) {
    throw DimensionMismatch("baseline torque does not match joint count");
  }
  tau_min_.resize(m);
  tau_max_.resize(m);
  int j = 0;
  for (const auto& ch : chains_) {
    for (const auto& joint : ch.joints) {
      tau_min_[j] = joint.tau_min;
      tau_max_[j] = joint.tau_max;
      if (!(joint.tau_min <= tau_base[j] && tau_base[j] <= joint.tau_max)) {
        throw DegenerateInput("baseline torque outside the torque box");
      }
      ++j;
    }
  }
  state_.tau_base = std::move(tau_base);
  state_.alpha = 0.0;
  state_.mode = ControlMode::Idle;
}

bool Controller::applicable() const {
  return class_.has_value() && class_->rsc_applicable;
}

void Controller::update_model(const GraspModel& model, double clock) {
  class_ = classify_grasp(model.grasp_matrix, model.hand_jacobian);
  model_ = model;
  model_time_ = clock;
  if (!class_->rsc_applicable) {
    state_.mode = ControlMode::NotApplicable;
    state_.current_profile.reset();
    state_.alpha = 0.0;
    problem_.reset();
    warm_.reset();
    pending_command_time_ = kInf;
    ramp_complete_ = true;
    return;
  }
  const NullspaceBasis basis = nullspace_basis(model.grasp_matrix);
  problem_ = assemble_qp(model, basis, chains_, config_.weights);
  InternalForceProfile profile =
      solve_internal_qp(*problem_, config_.qp_options, warm_);
  warm_ = WarmStart{profile.raw_coefficients, profile.duals};
  state_.current_profile = std::move(profile);
  if (state_.mode == ControlMode::NotApplicable) {
    state_.mode = ControlMode::Idle;
    state_.alpha = 0.0;
  }
}

Eigen::VectorXd Controller::assemble_command(double alpha_request) {
  const InternalForceProfile& profile = *state_.current_profile;
  const Eigen::MatrixXd& jacobian = model_->hand_jacobian;
  const double alpha = cap_alpha(alpha_request, profile, jacobian,
                                 state_.tau_base, tau_min_, tau_max_);
  Eigen::VectorXd tau_cmd =
      state_.tau_base + compute_torque_increment(profile, alpha, jacobian);
  // The ratio arithmetic can overshoot a bound by an ulp; the emitted
  // command must satisfy the box exactly.
  tau_cmd = tau_cmd.cwiseMax(tau_min_).cwiseMin(tau_max_);
  state_.alpha = alpha;
  return tau_cmd;
}

void Controller::emit(double clock, const Eigen::VectorXd& tau_cmd) {
  state_.last_command_time = clock;
  log_.push_back(CommandRecord{clock, state_.mode, state_.alpha, tau_cmd});
}

std::optional<Eigen::VectorXd> Controller::step(
    const std::optional<SlipCue>& cue, double clock) {
  if (cue) {
    if (cue->detected) {
      // Cues closer than the refractory window extend the current event;
      // only a fresh cluster re-arms the machine.
      const bool new_event =
          cue->timestamp - last_positive_cue_ > config_.refractory_s;
      last_positive_cue_ = cue->timestamp;
      state_.last_slip_cue_time = cue->timestamp;
      if (state_.mode == ControlMode::Idle ||
          ((state_.mode == ControlMode::Reinforcing ||
            state_.mode == ControlMode::Stabilized) &&
           new_event)) {
        state_.mode = ControlMode::Slipping;
        pending_command_time_ = cue->timestamp + config_.processing_latency_s;
      }
    }
  }

  if (state_.mode == ControlMode::NotApplicable) return std::nullopt;

  std::optional<Eigen::VectorXd> command;

  if (state_.mode == ControlMode::Slipping &&
      clock + kTimeSlack >= pending_command_time_) {
    if (clock - model_time_ > config_.staleness_bound_s) {
      throw StaleModel("grasp model older than the staleness bound at "
                       "command time");
    }
    if (!state_.current_profile) {
      throw DegenerateInput("no internal-force profile installed");
    }
    state_.mode = ControlMode::Reinforcing;
    if (config_.policy == ReinforcePolicy::SingleStep) {
      command = assemble_command(config_.alpha);
      ramp_complete_ = true;
      emit(clock, *command);
    } else {
      ramp_start_ = pending_command_time_;
      ramp_complete_ = false;
    }
    pending_command_time_ = kInf;
  }

  if (state_.mode == ControlMode::Reinforcing && !ramp_complete_) {
    double fraction = 1.0;
    if (config_.ramp_duration_s > 0.0) {
      fraction = std::clamp((clock - ramp_start_) / config_.ramp_duration_s,
                            0.0, 1.0);
    }
    if (fraction >= 1.0) ramp_complete_ = true;
    command = assemble_command(config_.alpha * fraction);
    emit(clock, *command);
  }

  if (state_.mode == ControlMode::Reinforcing && ramp_complete_) {
    const double quiet_since =
        std::max(last_positive_cue_, state_.last_command_time);
    if (clock - quiet_since >= config_.stabilize_hold_s) {
      state_.mode = ControlMode::Stabilized;
    }
  }

  return command;
}

}  // namespace slipstop
