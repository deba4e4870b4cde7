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

#ifndef SLIPSTOP_BENCH_TRIAL_HPP_
#define SLIPSTOP_BENCH_TRIAL_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slipstop/bench/dynamics.hpp"
#include "slipstop/controller.hpp"
#include "slipstop/rng.hpp"
#include "slipstop/scenario.hpp"

namespace slipstop {

// Per-trial outcome figures. Delays are NaN when the defining events never
// happened in the trial (no slip, no cue, no stop).
struct TrialMetrics {
  bool applicable = true;
  bool slip_started = false;
  bool stabilized = false;
  bool slide_limit_hit = false;
  double onset_detection_delay_s =
      std::numeric_limits<double>::quiet_NaN();
  double offset_detection_delay_s =
      std::numeric_limits<double>::quiet_NaN();
  double reaction_to_stop_delay_s =
      std::numeric_limits<double>::quiet_NaN();
  double pre_stop_displacement_m =
      std::numeric_limits<double>::quiet_NaN();
  double total_displacement_m = 0.0;
  int command_count = 0;
  double slip_onset_time_s = std::numeric_limits<double>::quiet_NaN();
  double slip_stop_time_s = std::numeric_limits<double>::quiet_NaN();
  double first_onset_cue_time_s = std::numeric_limits<double>::quiet_NaN();
  double first_command_time_s = std::numeric_limits<double>::quiet_NaN();
};

// One decimated sample of the trial time series.
struct TraceRow {
  double t_s = 0.0;
  double traction_n = 0.0;
  double object_pos_m = 0.0;
  double object_vel_mps = 0.0;
  std::vector<double> normal_forces_n;
  std::vector<double> margins_n;
  bool slip_ground_truth = false;
  bool cue_detected = false;
  std::string mode;
  double alpha = 0.0;
  std::vector<double> tau_cmd_nm;
};

struct TrialResult {
  TrialMetrics metrics;
  std::vector<TraceRow> trace;
  std::vector<CommandRecord> commands;
  std::optional<InternalForceProfile> profile;
  GraspModel model;
  GraspClass grasp_class;
  double onset_threshold_used = 0.0;
};

// Runs one trial: dynamics, vibration synthesis, detection, and (unless the
// scenario is scripted) the reactive controller, all on one simulated clock
// at the scenario dt. Deterministic per (scenario, seed).
TrialResult run_trial(const ScenarioConfig& cfg);

// Trace serialization. Fixed column set; floating-point fields printed
// with round-trip precision so identical runs are byte-identical.
void write_trace(const TrialResult& result, std::ostream& os);
void write_trace_file(const TrialResult& result, const std::string& path);

struct BatchRow {
  std::string scenario;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  TrialMetrics metrics;
};

// Cartesian product of scenarios and seeds; failed trials are flagged in
// their row instead of aborting the batch. `jobs` bounds worker threads;
// row order is independent of scheduling.
std::vector<BatchRow> run_batch(const std::vector<ScenarioConfig>& scenarios,
                                const std::vector<std::uint64_t>& seeds,
                                int jobs = 1);

// Per-trial rows followed by aggregate mean and std rows over the
// successful trials.
void write_metrics(const std::vector<BatchRow>& rows, std::ostream& os);
void write_metrics_file(const std::vector<BatchRow>& rows,
                        const std::string& path);

// Fresh variant of `base` with knot profiles resampled uniformly from its
// batch_ranges (absent ranges leave the profiles untouched).
ScenarioConfig randomize_scenario(const ScenarioConfig& base, Rng* rng);

}  // namespace slipstop

#endif  // SLIPSTOP_BENCH_TRIAL_HPP_
