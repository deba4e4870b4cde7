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

#ifndef SLIPSTOP_CONTROLLER_HPP_
#define SLIPSTOP_CONTROLLER_HPP_

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "slipstop/finger_chain.hpp"
#include "slipstop/grasp_model.hpp"
#include "slipstop/nullspace.hpp"
#include "slipstop/qp.hpp"
#include "slipstop/slip_cue.hpp"

namespace slipstop {

enum class ControlMode { Idle, Slipping, Reinforcing, Stabilized, NotApplicable };

const char* to_string(ControlMode m);

struct RSCState {
  ControlMode mode = ControlMode::Idle;
  Eigen::VectorXd tau_base;
  std::optional<InternalForceProfile> current_profile;
  double alpha = 0.0;
  double last_slip_cue_time = -std::numeric_limits<double>::infinity();
  double last_command_time = -std::numeric_limits<double>::infinity();
};

// Command log row serialized into the trial trace.
struct CommandRecord {
  double timestamp = 0.0;
  ControlMode mode = ControlMode::Idle;
  double alpha = 0.0;
  Eigen::VectorXd tau_cmd;
};

enum class ReinforcePolicy { SingleStep, Progressive };

struct ControllerConfig {
  ReinforcePolicy policy = ReinforcePolicy::SingleStep;
  // Fixed reinforcement gain; capped per-command by the torque margin.
  double alpha = 8.0;
  // Progressive policy ramps alpha from 0 to `alpha` over this duration.
  double ramp_duration_s = 0.15;
  // Cue-to-command latency covering model update and QP solve.
  double processing_latency_s = 0.009;
  // Cues inside this window after a reinforcement belong to the same event.
  double refractory_s = 0.1;
  // No-slip dwell required before declaring the grasp stabilized.
  double stabilize_hold_s = 0.05;
  // Maximum model age when a command is issued. Callers running a static
  // (never re-estimated) model should raise this to infinity.
  double staleness_bound_s = 0.05;
  ObjectiveWeights weights;
  SolveOptions qp_options;
};

// Joint-space reinforcement for a unit-norm internal-force direction:
// alpha * J^T * f0_star.
Eigen::VectorXd compute_torque_increment(const InternalForceProfile& profile,
                                         double alpha,
                                         const Eigen::MatrixXd& jacobian);

// Largest gain in [0, alpha_request] keeping tau_base + gain * J^T f0_star
// inside the torque box. Zero when a saturated joint is pushed further.
double cap_alpha(double alpha_request, const InternalForceProfile& profile,
                 const Eigen::MatrixXd& jacobian,
                 const Eigen::VectorXd& tau_base,
                 const Eigen::VectorXd& tau_min,
                 const Eigen::VectorXd& tau_max);

// Single-owner reactive state machine. Advance with step(); cues and model
// updates are consumed at most once per call. Not thread-safe by design:
// delegate QP solves to a worker and hand results back between steps.
class Controller {
 public:
  Controller(ControllerConfig config, Eigen::VectorXd tau_base,
             std::vector<FingerChain> chains);

  // Installs a grasp model: classifies it, refreshes the null-space basis
  // and internal-force profile. A grasp that fails the applicability gate
  // parks the machine in NotApplicable until a usable model arrives.
  void update_model(const GraspModel& model, double clock);

  // Advances the machine to `clock`. Returns a full joint-torque command
  // when one is due this step, absent otherwise.
  std::optional<Eigen::VectorXd> step(const std::optional<SlipCue>& cue,
                                      double clock);

  const RSCState& state() const { return state_; }
  const std::vector<CommandRecord>& command_log() const { return log_; }
  bool applicable() const;
  const std::optional<GraspClass>& grasp_class() const { return class_; }
  const std::optional<GraspModel>& model() const { return model_; }
  const ControllerConfig& config() const { return config_; }

 private:
  Eigen::VectorXd assemble_command(double clock);
  void emit(double clock, const Eigen::VectorXd& tau_cmd);

  ControllerConfig config_;
  std::vector<FingerChain> chains_;
  Eigen::VectorXd tau_min_;
  Eigen::VectorXd tau_max_;
  RSCState state_;
  std::vector<CommandRecord> log_;

  std::optional<GraspModel> model_;
  std::optional<GraspClass> class_;
  std::optional<QPProblem> problem_;
  std::optional<WarmStart> warm_;
  double model_time_ = -std::numeric_limits<double>::infinity();

  double pending_command_time_ = std::numeric_limits<double>::infinity();
  double ramp_start_ = std::numeric_limits<double>::infinity();
  bool ramp_complete_ = true;
  double last_positive_cue_ = -std::numeric_limits<double>::infinity();
};

}  // namespace slipstop

#endif  // SLIPSTOP_CONTROLLER_HPP_
