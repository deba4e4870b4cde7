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

#ifndef SLIPSTOP_SCENARIO_HPP_
#define SLIPSTOP_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipstop/bench/dynamics.hpp"
#include "slipstop/contact.hpp"
#include "slipstop/controller.hpp"
#include "slipstop/finger_chain.hpp"
#include "slipstop/geometry.hpp"
#include "slipstop/tactile/detector.hpp"
#include "slipstop/tactile/pze.hpp"
#include "slipstop/tactile/pzr.hpp"

namespace slipstop {

// Optional PzR estimation loop: when enabled the trial periodically renders
// pressure frames at each contact, re-estimates contact poses and rebuilds
// the controller's grasp model from them.
struct EstimationConfig {
  bool use_pzr = false;
  double rate_hz = 100.0;
  PadGeometry pad;  // pad frame is derived per contact at runtime
};

// Uniform sampling ranges for randomized batches. Only present fields are
// randomized; times are relative to the traction step.
struct RangeSpec {
  double lo = 0.0;
  double hi = 0.0;
};

struct BatchRanges {
  std::optional<RangeSpec> traction_initial_n;
  std::optional<RangeSpec> traction_step_n;
  std::optional<RangeSpec> grasp_initial_n;
  std::optional<RangeSpec> grasp_target_n;
  std::optional<RangeSpec> grasp_ramp_s;
  std::optional<RangeSpec> grasp_reaction_delay_s;
};

// One self-contained trial description. File format: JSON with explicit
// units in key names; geometry either spelled out (contacts/chains) or
// generated from a named preset at load time. Serialization always writes
// the explicit form, and load(save(x)) == x.
struct ScenarioConfig {
  std::string name;

  std::vector<Contact> contacts;
  std::vector<FingerChain> chains;
  Pose object_frame;
  Eigen::Vector3d pull_axis{0.0, 0.0, 1.0};
  Eigen::VectorXd baseline_normals;  // per-contact baseline normal force, N

  double object_mass_kg = 0.2;
  double mu_kinetic_ratio = 0.8;
  double v_eps_mps = 1e-4;
  double dt_s = 1e-4;
  double duration_s = 2.0;
  double slide_limit_m = 0.2;
  int trace_decimation = 10;

  std::vector<TractionKnot> traction_profile;
  // Scripted mode only: per-contact normal force trajectory.
  std::vector<TractionKnot> grasp_profile;

  ReinforcePolicy policy = ReinforcePolicy::SingleStep;
  bool scripted = false;
  double alpha = 8.0;
  double ramp_duration_s = 0.15;
  double processing_latency_s = 0.009;
  double refractory_s = 0.1;
  double stabilize_hold_s = 0.05;
  // Infinity unless the estimation loop refreshes the model.
  double staleness_bound_s = std::numeric_limits<double>::infinity();
  ObjectiveWeights weights;

  VibrationConfig vibration;
  DetectorConfig detector;
  bool auto_calibrate = true;
  double calibration_duration_s = 2.0;
  double calibration_safety = 1.5;

  EstimationConfig estimation;
  std::optional<BatchRanges> batch_ranges;

  std::uint64_t seed = 1;

  // Stacked contact-frame baseline force vector [f_n, 0, 0] per contact.
  ContactForceVector baseline_force_vector() const;
};

// Parses (expanding any preset) and validates. Throws ScenarioInvalid with
// a diagnostic naming the offending field.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

// Serializes the explicit form (presets already expanded).
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

// Structural validation: geometry consistency, sorted profiles, positive
// steps, torque boxes, finger id cross-references. Throws ScenarioInvalid.
void validate_scenario(const ScenarioConfig& cfg);

// Built-in geometries. `kind` is one of: antipodal, tridigital,
// single_contact, hyperstatic. Parameters have sane defaults matching the
// shipped scenario files.
struct PresetParams {
  std::string kind = "antipodal";
  double radius_m = 0.03;
  double mu = 0.5;
  int joints_per_finger = 3;
  double phalanx_spacing_m = 0.03;
  double fingertip_limit_n = 20.0;
};

// Fills contacts/chains/object_frame/pull_axis from the preset geometry.
void apply_preset(const PresetParams& p, ScenarioConfig* cfg);

}  // namespace slipstop

#endif  // SLIPSTOP_SCENARIO_HPP_
