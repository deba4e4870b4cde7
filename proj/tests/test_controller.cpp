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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slipstop/controller.hpp"
#include "slipstop/errors.hpp"
#include "slipstop/scenario.hpp"

using namespace slipstop;

namespace {

struct Rig {
  GraspModel model;
  std::vector<FingerChain> chains;
  Eigen::VectorXd tau_base;
};

// Two opposed fingertips squeezing at 8 N each. Proximal lever 0.09 m, so
// tau_base[0] = 0.72 and the box [-1.8, 1.8] leaves 1.08 of headroom.
Rig antipodal_rig() {
  ScenarioConfig cfg;
  PresetParams p;
  p.kind = "antipodal";
  apply_preset(p, &cfg);
  Rig rig;
  rig.model = GraspModel::build(cfg.contacts, cfg.chains, cfg.object_frame);
  rig.chains = cfg.chains;
  Eigen::VectorXd f_base = Eigen::VectorXd::Zero(6);
  f_base[0] = f_base[3] = 8.0;
  rig.tau_base = rig.model.hand_jacobian.transpose() * f_base;
  return rig;
}

SlipCue cue_at(double t, bool detected = true) {
  SlipCue c;
  c.detected = detected;
  c.confidence = detected ? 1.0 : 0.0;
  c.timestamp = t;
  return c;
}

}  // namespace

TEST_CASE("torque increment is alpha * J^T * direction") {
  const Rig rig = antipodal_rig();
  InternalForceProfile profile;
  profile.direction = Eigen::VectorXd::Zero(6);
  profile.direction[0] = profile.direction[3] = 1.0 / std::sqrt(2.0);
  const Eigen::VectorXd tau =
      compute_torque_increment(profile, 2.0, rig.model.hand_jacobian);
  CHECK(tau.size() == 6);
  CHECK(tau[0] == doctest::Approx(2.0 * 0.09 / std::sqrt(2.0)));
  CHECK_THROWS_AS(
      compute_torque_increment(profile, -1.0, rig.model.hand_jacobian),
      DegenerateInput);
  InternalForceProfile wrong;
  wrong.direction = Eigen::VectorXd::Zero(9);
  CHECK_THROWS_AS(
      compute_torque_increment(wrong, 1.0, rig.model.hand_jacobian),
      DimensionMismatch);
}

TEST_CASE("cap_alpha clips the gain to the torque box") {
  InternalForceProfile profile;
  profile.direction = Eigen::Vector3d(1.0, 0.0, 0.0);
  Eigen::MatrixXd jac(3, 1);
  jac << 0.5, 0.0, 0.0;  // J^T * direction = 0.5 per unit alpha
  Eigen::VectorXd base = Eigen::VectorXd::Constant(1, 0.2);
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(1, -1.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(1, 1.0);

  CHECK(cap_alpha(1.0, profile, jac, base, lo, hi) == doctest::Approx(1.0));
  CHECK(cap_alpha(5.0, profile, jac, base, lo, hi) == doctest::Approx(1.6));

  // Negative demand binds against the lower bound instead.
  profile.direction[0] = -1.0;
  CHECK(cap_alpha(5.0, profile, jac, base, lo, hi) == doctest::Approx(2.4));

  // A joint already at its limit admits no push in that direction.
  profile.direction[0] = 1.0;
  base[0] = 1.0;
  CHECK(cap_alpha(5.0, profile, jac, base, lo, hi) == doctest::Approx(0.0));

  base[0] = 1.5;  // outside the box
  CHECK_THROWS_AS(cap_alpha(5.0, profile, jac, base, lo, hi),
                  DegenerateInput);
  base[0] = 0.2;
  CHECK_THROWS_AS(cap_alpha(-0.1, profile, jac, base, lo, hi),
                  DegenerateInput);
}

TEST_CASE("single-step policy: one command, placed one latency after the cue") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;
  cfg.policy = ReinforcePolicy::SingleStep;
  cfg.alpha = 10.0;
  cfg.processing_latency_s = 0.009;
  cfg.refractory_s = 0.1;
  cfg.stabilize_hold_s = 0.05;
  cfg.staleness_bound_s = std::numeric_limits<double>::infinity();
  Controller ctl(cfg, rig.tau_base, rig.chains);
  ctl.update_model(rig.model, 0.0);
  REQUIRE(ctl.applicable());
  CHECK(ctl.state().mode == ControlMode::Idle);

  const double dt = 0.001;
  double first_command = -1.0;
  for (int i = 0; i < 200; ++i) {
    const double t = (i + 1) * dt;
    std::optional<SlipCue> cue;
    // A burst of positive verdicts every 4 ms between 20 ms and 60 ms,
    // the cadence of a hop-based detector. One event, many cues.
    if (t >= 0.020 - 1e-9 && t <= 0.060 + 1e-9) {
      const long k = std::lround(t / dt);
      if (k % 4 == 0) cue = cue_at(t);
    }
    auto cmd = ctl.step(cue, t);
    if (cmd && first_command < 0.0) {
      first_command = t;
      CHECK(ctl.state().mode == ControlMode::Reinforcing);
      // alpha survives uncapped: headroom allows up to ~16.97.
      CHECK(ctl.state().alpha == doctest::Approx(10.0));
      CHECK((*cmd)[0] ==
            doctest::Approx(0.72 + 10.0 * 0.09 / std::sqrt(2.0)));
    }
  }
  CHECK(first_command == doctest::Approx(0.029).epsilon(1e-6));
  CHECK(ctl.command_log().size() == 1);
  // Quiet period starts at the last positive cue (60 ms); hold is 50 ms.
  CHECK(ctl.state().mode == ControlMode::Stabilized);
}

TEST_CASE("a fresh slip event beyond the refractory window re-arms") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;
  cfg.alpha = 5.0;
  cfg.processing_latency_s = 0.009;
  cfg.refractory_s = 0.1;
  cfg.stabilize_hold_s = 0.05;
  cfg.staleness_bound_s = std::numeric_limits<double>::infinity();
  Controller ctl(cfg, rig.tau_base, rig.chains);
  ctl.update_model(rig.model, 0.0);

  const double dt = 0.001;
  for (int i = 0; i < 500; ++i) {
    const double t = (i + 1) * dt;
    std::optional<SlipCue> cue;
    if (std::abs(t - 0.020) < dt / 2) cue = cue_at(t);
    if (std::abs(t - 0.300) < dt / 2) cue = cue_at(t);
    ctl.step(cue, t);
  }
  REQUIRE(ctl.command_log().size() == 2);
  CHECK(ctl.command_log()[0].timestamp == doctest::Approx(0.029));
  CHECK(ctl.command_log()[1].timestamp == doctest::Approx(0.309));
  CHECK(ctl.state().mode == ControlMode::Stabilized);
}

TEST_CASE("progressive policy ramps alpha and settles at the target") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;
  cfg.policy = ReinforcePolicy::Progressive;
  cfg.alpha = 10.0;
  cfg.ramp_duration_s = 0.15;
  cfg.processing_latency_s = 0.009;
  cfg.stabilize_hold_s = 0.05;
  cfg.staleness_bound_s = std::numeric_limits<double>::infinity();
  Controller ctl(cfg, rig.tau_base, rig.chains);
  ctl.update_model(rig.model, 0.0);

  const double dt = 0.01;
  for (int i = 0; i < 60; ++i) {
    const double t = (i + 1) * dt;
    std::optional<SlipCue> cue;
    if (std::abs(t - 0.02) < dt / 2) cue = cue_at(t);
    ctl.step(cue, t);
  }
  const auto& log = ctl.command_log();
  REQUIRE(log.size() >= 2);
  for (size_t k = 1; k < log.size(); ++k) {
    CHECK(log[k].alpha >= log[k - 1].alpha - 1e-12);
    CHECK(log[k].timestamp > log[k - 1].timestamp);
  }
  CHECK(log.front().alpha < cfg.alpha);
  CHECK(log.back().alpha == doctest::Approx(cfg.alpha));
  CHECK(ctl.state().mode == ControlMode::Stabilized);
}

TEST_CASE("requested gain is capped by the most binding joint") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;
  cfg.alpha = 100.0;  // far beyond the torque headroom
  cfg.staleness_bound_s = std::numeric_limits<double>::infinity();
  Controller ctl(cfg, rig.tau_base, rig.chains);
  ctl.update_model(rig.model, 0.0);

  std::optional<Eigen::VectorXd> cmd;
  for (int i = 0; i < 60 && !cmd; ++i) {
    const double t = (i + 1) * 0.001;
    std::optional<SlipCue> cue;
    if (i == 0) cue = cue_at(t);
    cmd = ctl.step(cue, t);
  }
  REQUIRE(cmd.has_value());
  // 1.08 of proximal headroom at 0.09/sqrt(2) per unit alpha.
  CHECK(ctl.state().alpha == doctest::Approx(16.9706).epsilon(1e-4));
  CHECK((*cmd)[0] == doctest::Approx(1.8));
  CHECK((*cmd)[0] <= 1.8 + 1e-15);
  CHECK((*cmd)[3] <= 1.8 + 1e-15);
}

TEST_CASE("a stale model blocks command emission") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;
  cfg.processing_latency_s = 0.009;
  cfg.staleness_bound_s = 0.05;
  Controller ctl(cfg, rig.tau_base, rig.chains);
  ctl.update_model(rig.model, 0.0);

  // Cue arrives 100 ms in; by command time the model is 109 ms old.
  ctl.step(cue_at(0.100), 0.100);
  CHECK_THROWS_AS(ctl.step(std::nullopt, 0.109), StaleModel);
}

TEST_CASE("model refresh resets the staleness clock") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;
  cfg.processing_latency_s = 0.009;
  cfg.staleness_bound_s = 0.05;
  Controller ctl(cfg, rig.tau_base, rig.chains);
  ctl.update_model(rig.model, 0.0);

  ctl.step(cue_at(0.100), 0.100);
  ctl.update_model(rig.model, 0.105);
  auto cmd = ctl.step(std::nullopt, 0.109);
  CHECK(cmd.has_value());
}

TEST_CASE("grasps without internal forces park the machine") {
  ScenarioConfig cfg;
  PresetParams p;
  p.kind = "single_contact";
  apply_preset(p, &cfg);
  const GraspModel model =
      GraspModel::build(cfg.contacts, cfg.chains, cfg.object_frame);
  Eigen::VectorXd f_base = Eigen::VectorXd::Zero(3);
  f_base[0] = 8.0;
  const Eigen::VectorXd tau_base =
      model.hand_jacobian.transpose() * f_base;

  ControllerConfig ctl_cfg;
  ctl_cfg.staleness_bound_s = std::numeric_limits<double>::infinity();
  Controller ctl(ctl_cfg, tau_base, cfg.chains);
  ctl.update_model(model, 0.0);
  CHECK_FALSE(ctl.applicable());
  CHECK(ctl.state().mode == ControlMode::NotApplicable);

  for (int i = 0; i < 100; ++i) {
    const double t = (i + 1) * 0.001;
    auto cmd = ctl.step(cue_at(t), t);
    CHECK_FALSE(cmd.has_value());
  }
  CHECK(ctl.command_log().empty());
  CHECK(ctl.state().mode == ControlMode::NotApplicable);
}

TEST_CASE("constructor validates the baseline against the chains") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;

  Eigen::VectorXd short_base = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(Controller(cfg, short_base, rig.chains),
                  DimensionMismatch);

  Eigen::VectorXd outside = rig.tau_base;
  outside[0] = 5.0;  // beyond tau_max = 1.8
  CHECK_THROWS_AS(Controller(cfg, outside, rig.chains), DegenerateInput);
}

TEST_CASE("negative verdicts never trigger commands") {
  const Rig rig = antipodal_rig();
  ControllerConfig cfg;
  cfg.staleness_bound_s = std::numeric_limits<double>::infinity();
  Controller ctl(cfg, rig.tau_base, rig.chains);
  ctl.update_model(rig.model, 0.0);
  for (int i = 0; i < 100; ++i) {
    const double t = (i + 1) * 0.001;
    auto cmd = ctl.step(cue_at(t, false), t);
    CHECK_FALSE(cmd.has_value());
  }
  CHECK(ctl.state().mode == ControlMode::Idle);
  CHECK(ctl.command_log().empty());
}
