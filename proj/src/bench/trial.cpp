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

#include "slipstop/bench/trial.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "slipstop/errors.hpp"
#include "slipstop/nullspace.hpp"
#include "slipstop/tactile/detector.hpp"
#include "slipstop/tactile/pze.hpp"
#include "slipstop/tactile/pzr.hpp"

namespace slipstop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pads are mounted so the initial contact projects onto the grid center
// (taxel coordinates (3.5, 3.5)) with the pad normal along the contact
// normal. The mount is rigid: it does not track later estimates.
PadGeometry pad_at_contact(const PadGeometry& base, const Contact& c) {
  PadGeometry pad = base;
  Eigen::Matrix3d rot;
  rot.col(0) = c.tangent1;
  rot.col(1) = c.tangent2;
  rot.col(2) = c.normal;
  pad.frame.rotation = rot;
  const Eigen::Vector3d center_local(3.5 * pad.pitch_m, 3.5 * pad.pitch_m,
                                     0.0);
  pad.frame.origin = c.position - rot * center_local;
  return pad;
}

std::vector<int> unique_finger_ids(const std::vector<Contact>& contacts) {
  std::vector<int> ids;
  for (const Contact& c : contacts) {
    if (std::find(ids.begin(), ids.end(), c.finger_id) == ids.end()) {
      ids.push_back(c.finger_id);
    }
  }
  return ids;
}

void append_g17(std::string* out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out->append(buf);
}

}  // namespace

TrialResult run_trial(const ScenarioConfig& cfg) {
  validate_scenario(cfg);

  TrialResult result;
  result.model =
      GraspModel::build(cfg.contacts, cfg.chains, cfg.object_frame, 0.0);
  result.grasp_class =
      classify_grasp(result.model.grasp_matrix, result.model.hand_jacobian);
  result.metrics.applicable = result.grasp_class.rsc_applicable;

  const std::vector<Contact>& contacts = result.model.contacts;
  const int nc = static_cast<int>(contacts.size());
  const std::vector<int> finger_ids = unique_finger_ids(contacts);

  // Fixed fork order; consumers must not share streams or trace
  // reproducibility breaks.
  Rng master(cfg.seed);
  const std::uint64_t calib_seed = master.next_u64();
  const std::uint64_t synth_seed = master.next_u64();
  const std::uint64_t pzr_seed = master.next_u64();

  DetectorConfig det_cfg = cfg.detector;
  if (cfg.auto_calibrate) {
    det_cfg.onset_threshold = calibrate_onset_threshold(
        cfg.vibration, det_cfg, cfg.calibration_duration_s, calib_seed,
        cfg.calibration_safety);
    det_cfg.offset_threshold = det_cfg.onset_threshold / 2.0;
  }
  result.onset_threshold_used = det_cfg.onset_threshold;

  BandEnergyDetector detector(det_cfg);
  VibrationSynth synth(cfg.vibration, synth_seed);
  Rng pzr_rng(pzr_seed);

  const ContactForceVector baseline = cfg.baseline_force_vector();
  const Eigen::VectorXd tau_base =
      result.model.hand_jacobian.transpose() * baseline;

  std::optional<Controller> controller;
  if (!cfg.scripted) {
    ControllerConfig cc;
    cc.policy = cfg.policy;
    cc.alpha = cfg.alpha;
    cc.ramp_duration_s = cfg.ramp_duration_s;
    cc.processing_latency_s = cfg.processing_latency_s;
    cc.refractory_s = cfg.refractory_s;
    cc.stabilize_hold_s = cfg.stabilize_hold_s;
    cc.staleness_bound_s = cfg.staleness_bound_s;
    cc.weights = cfg.weights;
    controller.emplace(cc, tau_base, cfg.chains);
    controller->update_model(result.model, 0.0);
  }

  SimParams params;
  params.object_mass_kg = cfg.object_mass_kg;
  params.mu_kinetic_ratio = cfg.mu_kinetic_ratio;
  params.v_eps_mps = cfg.v_eps_mps;
  params.pull_axis = cfg.pull_axis;

  const int n_steps = static_cast<int>(std::llround(cfg.duration_s / cfg.dt_s));
  const int est_period =
      (cfg.estimation.use_pzr && cfg.estimation.rate_hz > 0.0)
          ? std::max(1, static_cast<int>(std::llround(
                            1.0 / (cfg.estimation.rate_hz * cfg.dt_s))))
          : 0;

  ContactForceVector commanded = baseline;
  Eigen::VectorXd tau_trace = tau_base;
  SimState state;
  state.contact_forces =
      share_traction(commanded, contacts, eval_profile(cfg.traction_profile, 0.0),
                     cfg.pull_axis);
  state.traction_n = eval_profile(cfg.traction_profile, 0.0);

  TrialMetrics& m = result.metrics;
  double pos_at_onset = kNaN;
  double pos_at_stop = kNaN;
  double offset_cue_time = kNaN;
  bool saw_positive_cue = false;

  auto trace_row = [&](const SimState& s) {
    TraceRow row;
    row.t_s = s.clock_s;
    row.traction_n = s.traction_n;
    row.object_pos_m = s.object_position_m;
    row.object_vel_mps = s.object_velocity_mps;
    row.normal_forces_n.resize(nc);
    for (int k = 0; k < nc; ++k) {
      row.normal_forces_n[k] = s.contact_forces[3 * k];
    }
    row.margins_n = cone_margin(s.contact_forces, contacts);
    row.slip_ground_truth = s.slipping;
    row.cue_detected = detector.slipping();
    if (cfg.scripted) {
      row.mode = "Scripted";
      row.alpha = 0.0;
    } else {
      row.mode = to_string(controller->state().mode);
      row.alpha = controller->state().alpha;
    }
    row.tau_cmd_nm.assign(tau_trace.data(), tau_trace.data() + tau_trace.size());
    result.trace.push_back(std::move(row));
  };

  trace_row(state);

  for (int i = 0; i < n_steps; ++i) {
    const double t = (i + 1) * cfg.dt_s;
    const double traction = eval_profile(cfg.traction_profile, t);

    if (cfg.scripted) {
      const double grip = eval_profile(cfg.grasp_profile, t);
      for (int k = 0; k < nc; ++k) commanded[3 * k] = grip;
      tau_trace = result.model.hand_jacobian.transpose() * commanded;
    }

    const double prev_v = state.object_velocity_mps;
    state = step_dynamics(state, commanded, contacts, traction, cfg.dt_s,
                          params);

    if (!m.slip_started && state.slipping) {
      m.slip_started = true;
      m.slip_onset_time_s = t;
      pos_at_onset = state.object_position_m - state.object_velocity_mps * cfg.dt_s;
    }
    if (prev_v > 0.0 && state.object_velocity_mps == 0.0) {
      m.slip_stop_time_s = t;
      pos_at_stop = state.object_position_m;
    }

    double total_normal = 0.0;
    for (int k = 0; k < nc; ++k) total_normal += commanded[3 * k];
    const PzESample sample =
        synth.step(std::abs(state.object_velocity_mps), total_normal);
    std::optional<SlipCue> cue = detector.push(sample);
    if (cue) {
      cue->finger_ids = finger_ids;
      if (cue->detected) {
        if (std::isnan(m.first_onset_cue_time_s)) {
          m.first_onset_cue_time_s = cue->timestamp;
        }
        saw_positive_cue = true;
      } else if (saw_positive_cue && std::isnan(offset_cue_time)) {
        offset_cue_time = cue->timestamp;
      }
    }

    if (!cfg.scripted) {
      if (est_period > 0 && (i + 1) % est_period == 0) {
        // Re-estimate every contact and rebuild the model; a failed
        // estimate (off-pad, below floor) skips the refresh and lets the
        // staleness guard do its job.
        std::vector<Contact> est;
        est.reserve(contacts.size());
        bool ok = true;
        for (int k = 0; k < nc; ++k) {
          const PadGeometry pad = pad_at_contact(cfg.estimation.pad, contacts[k]);
          const Eigen::Vector3d f = commanded.segment<3>(3 * k);
          const PzRFrame frame =
              render_pzr(contacts[k], f, pad, &pzr_rng, t);
          const auto guess = estimate_contact(frame, pad);
          if (!guess) {
            ok = false;
            break;
          }
          est.push_back(Contact::make(guess->first, guess->second,
                                      contacts[k].mu, contacts[k].finger_id,
                                      contacts[k].phalanx_id));
        }
        if (ok) {
          const GraspModel refreshed =
              GraspModel::build(est, cfg.chains, cfg.object_frame, t);
          controller->update_model(refreshed, t);
        }
      }

      const std::optional<Eigen::VectorXd> cmd = controller->step(cue, t);
      if (cmd) {
        const RSCState& cs = controller->state();
        commanded = map_torques_to_contact_forces(
            *cmd, tau_base, *controller->model(), *cs.current_profile,
            baseline, cs.alpha);
        tau_trace = *cmd;
        if (std::isnan(m.first_command_time_s)) m.first_command_time_s = t;
      }
    }

    const bool limit_hit = state.object_position_m >= cfg.slide_limit_m;
    if (limit_hit) m.slide_limit_hit = true;
    if (limit_hit || (i + 1) % cfg.trace_decimation == 0 || i + 1 == n_steps) {
      trace_row(state);
    }
    if (limit_hit) break;
  }

  m.total_displacement_m = state.object_position_m;
  const bool at_rest = state.object_velocity_mps == 0.0;
  m.stabilized = !m.slide_limit_hit && at_rest &&
                 (!m.slip_started || !std::isnan(m.slip_stop_time_s));

  if (!std::isnan(m.first_onset_cue_time_s) && !std::isnan(m.slip_onset_time_s)) {
    m.onset_detection_delay_s = m.first_onset_cue_time_s - m.slip_onset_time_s;
  }
  if (!std::isnan(offset_cue_time) && !std::isnan(m.slip_stop_time_s)) {
    const double d = offset_cue_time - m.slip_stop_time_s;
    if (d >= 0.0) m.offset_detection_delay_s = d;
  }
  if (!std::isnan(m.first_command_time_s) && !std::isnan(m.slip_stop_time_s)) {
    const double d = m.slip_stop_time_s - m.first_command_time_s;
    if (d >= 0.0) m.reaction_to_stop_delay_s = d;
  }
  if (!std::isnan(pos_at_stop) && !std::isnan(pos_at_onset)) {
    m.pre_stop_displacement_m = pos_at_stop - pos_at_onset;
  }

  if (controller) {
    result.commands = controller->command_log();
    m.command_count = static_cast<int>(result.commands.size());
    result.profile = controller->state().current_profile;
  }
  return result;
}

void write_trace(const TrialResult& result, std::ostream& os) {
  const int nc = result.trace.empty()
                     ? 0
                     : static_cast<int>(result.trace.front().normal_forces_n.size());
  const int nj = result.trace.empty()
                     ? 0
                     : static_cast<int>(result.trace.front().tau_cmd_nm.size());
  std::string line = "t_s,traction_N,object_pos_m,object_vel_mps";
  for (int k = 0; k < nc; ++k) line += ",fn" + std::to_string(k) + "_N";
  for (int k = 0; k < nc; ++k) line += ",margin" + std::to_string(k) + "_N";
  line += ",slip_ground_truth,cue_detected,mode,alpha";
  for (int j = 0; j < nj; ++j) line += ",tau_cmd" + std::to_string(j) + "_Nm";
  os << line << "\n";

  for (const TraceRow& row : result.trace) {
    line.clear();
    append_g17(&line, row.t_s);
    line += ',';
    append_g17(&line, row.traction_n);
    line += ',';
    append_g17(&line, row.object_pos_m);
    line += ',';
    append_g17(&line, row.object_vel_mps);
    for (double v : row.normal_forces_n) {
      line += ',';
      append_g17(&line, v);
    }
    for (double v : row.margins_n) {
      line += ',';
      append_g17(&line, v);
    }
    line += row.slip_ground_truth ? ",1" : ",0";
    line += row.cue_detected ? ",1" : ",0";
    line += ',';
    line += row.mode;
    line += ',';
    append_g17(&line, row.alpha);
    for (double v : row.tau_cmd_nm) {
      line += ',';
      append_g17(&line, v);
    }
    os << line << "\n";
  }
}

void write_trace_file(const TrialResult& result, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open trace file for writing: " + path);
  write_trace(result, os);
  os.flush();
  if (!os) throw Error("failed writing trace file: " + path);
}

std::vector<BatchRow> run_batch(const std::vector<ScenarioConfig>& scenarios,
                                const std::vector<std::uint64_t>& seeds,
                                int jobs) {
  if (scenarios.empty() || seeds.empty()) {
    throw DegenerateInput("batch needs at least one scenario and one seed");
  }
  const std::size_t total = scenarios.size() * seeds.size();
  std::vector<BatchRow> rows(total);

  auto work = [&](std::size_t idx) {
    const std::size_t si = idx / seeds.size();
    const std::size_t ki = idx % seeds.size();
    BatchRow& row = rows[idx];
    row.scenario = scenarios[si].name;
    row.seed = seeds[ki];
    try {
      ScenarioConfig cfg = scenarios[si];
      cfg.seed = seeds[ki];
      if (cfg.batch_ranges) {
        // Separate stream from the trial's own forks so parameter draws
        // never alias sensor noise.
        Rng rand_rng = Rng(cfg.seed).fork(0x72616e64ULL);
        cfg = randomize_scenario(cfg, &rand_rng);
      }
      row.metrics = run_trial(cfg).metrics;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (workers == 1) {
    for (std::size_t idx = 0; idx < total; ++idx) work(idx);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t idx = next.fetch_add(1); idx < total;
             idx = next.fetch_add(1)) {
          work(idx);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return rows;
}

namespace {

struct MetricColumn {
  const char* header;
  double (*get)(const TrialMetrics&);
};

const MetricColumn kColumns[] = {
    {"onset_detection_delay_s",
     [](const TrialMetrics& m) { return m.onset_detection_delay_s; }},
    {"offset_detection_delay_s",
     [](const TrialMetrics& m) { return m.offset_detection_delay_s; }},
    {"reaction_to_stop_delay_s",
     [](const TrialMetrics& m) { return m.reaction_to_stop_delay_s; }},
    {"pre_stop_displacement_m",
     [](const TrialMetrics& m) { return m.pre_stop_displacement_m; }},
    {"total_displacement_m",
     [](const TrialMetrics& m) { return m.total_displacement_m; }},
    {"command_count",
     [](const TrialMetrics& m) { return static_cast<double>(m.command_count); }},
};

}  // namespace

void write_metrics(const std::vector<BatchRow>& rows, std::ostream& os) {
  std::string line =
      "scenario,seed,failed,applicable,slip_started,stabilized,"
      "slide_limit_hit";
  for (const MetricColumn& col : kColumns) {
    line += ',';
    line += col.header;
  }
  line += ",error";
  os << line << "\n";

  for (const BatchRow& row : rows) {
    line.clear();
    line += row.scenario;
    line += ',';
    line += std::to_string(row.seed);
    line += row.failed ? ",1" : ",0";
    line += row.metrics.applicable ? ",1" : ",0";
    line += row.metrics.slip_started ? ",1" : ",0";
    line += row.metrics.stabilized ? ",1" : ",0";
    line += row.metrics.slide_limit_hit ? ",1" : ",0";
    for (const MetricColumn& col : kColumns) {
      line += ',';
      append_g17(&line, col.get(row.metrics));
    }
    line += ',';
    // Commas inside error text would shift columns; flatten them.
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    line += err;
    os << line << "\n";
  }

  // Aggregates over successful trials; NaN entries are excluded per
  // column, matching how the delays are defined.
  std::string mean_line = "mean,,,,,,";
  std::string std_line = "std,,,,,,";
  for (const MetricColumn& col : kColumns) {
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (const BatchRow& row : rows) {
      if (row.failed) continue;
      const double v = col.get(row.metrics);
      if (std::isnan(v)) continue;
      sum += v;
      sum2 += v * v;
      ++n;
    }
    mean_line += ',';
    std_line += ',';
    if (n > 0) {
      const double mean = sum / n;
      const double var = std::max(0.0, sum2 / n - mean * mean);
      append_g17(&mean_line, mean);
      append_g17(&std_line, std::sqrt(var));
    } else {
      mean_line += "nan";
      std_line += "nan";
    }
  }
  os << mean_line << ",\n" << std_line << ",\n";
}

void write_metrics_file(const std::vector<BatchRow>& rows,
                        const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open metrics file for writing: " + path);
  write_metrics(rows, os);
  os.flush();
  if (!os) throw Error("failed writing metrics file: " + path);
}

namespace {

// Shipped profiles are four-knot trapezoids: level, step (or ramp), level.
// Randomization keeps the knot times and resamples the two levels.
void require_four_knots(const std::vector<TractionKnot>& knots,
                        const char* which) {
  if (knots.size() != 4) {
    throw ScenarioInvalid(std::string(which) +
                          ": randomization needs a 4-knot profile");
  }
}

}  // namespace

ScenarioConfig randomize_scenario(const ScenarioConfig& base, Rng* rng) {
  ScenarioConfig out = base;
  if (!base.batch_ranges || rng == nullptr) return out;
  const BatchRanges& r = *base.batch_ranges;

  // Draw order is part of the trace contract: traction levels first, then
  // grasp levels, then grasp timing.
  if (r.traction_initial_n || r.traction_step_n) {
    require_four_knots(base.traction_profile, "traction_profile");
    double lo = base.traction_profile[0].force_n;
    double hi = base.traction_profile[3].force_n;
    if (r.traction_initial_n) {
      lo = rng->uniform(r.traction_initial_n->lo, r.traction_initial_n->hi);
    }
    if (r.traction_step_n) {
      hi = rng->uniform(r.traction_step_n->lo, r.traction_step_n->hi);
    }
    out.traction_profile[0].force_n = lo;
    out.traction_profile[1].force_n = lo;
    out.traction_profile[2].force_n = hi;
    out.traction_profile[3].force_n = hi;
  }

  const bool grasp_levels = r.grasp_initial_n || r.grasp_target_n;
  const bool grasp_timing = r.grasp_ramp_s || r.grasp_reaction_delay_s;
  if (grasp_levels || grasp_timing) {
    require_four_knots(base.grasp_profile, "grasp_profile");
    double lo = base.grasp_profile[0].force_n;
    double hi = base.grasp_profile[3].force_n;
    if (r.grasp_initial_n) {
      lo = rng->uniform(r.grasp_initial_n->lo, r.grasp_initial_n->hi);
    }
    if (r.grasp_target_n) {
      hi = rng->uniform(r.grasp_target_n->lo, r.grasp_target_n->hi);
    }
    out.grasp_profile[0].force_n = lo;
    out.grasp_profile[1].force_n = lo;
    out.grasp_profile[2].force_n = hi;
    out.grasp_profile[3].force_n = hi;
    if (grasp_timing) {
      // Reaction delay is measured from the traction step time (knot 1 of
      // the traction profile).
      const double t_step = base.traction_profile.size() == 4
                                ? base.traction_profile[1].t_s
                                : base.grasp_profile[1].t_s;
      double ramp = base.grasp_profile[2].t_s - base.grasp_profile[1].t_s;
      double delay = base.grasp_profile[1].t_s - t_step;
      if (r.grasp_ramp_s) {
        ramp = rng->uniform(r.grasp_ramp_s->lo, r.grasp_ramp_s->hi);
      }
      if (r.grasp_reaction_delay_s) {
        delay = rng->uniform(r.grasp_reaction_delay_s->lo,
                             r.grasp_reaction_delay_s->hi);
      }
      out.grasp_profile[1].t_s = t_step + delay;
      out.grasp_profile[2].t_s = t_step + delay + ramp;
      if (out.grasp_profile[2].t_s > out.grasp_profile[3].t_s) {
        out.grasp_profile[3].t_s = out.grasp_profile[2].t_s;
      }
    }
  }
  return out;
}

}  // namespace slipstop
