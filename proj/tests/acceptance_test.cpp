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

// End-to-end acceptance gate. Each test case checks one release criterion
// and prints a single PASS/FAIL line with its measured figures, so a bare
// run of this binary doubles as the release report.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "slipstop/bench/trial.hpp"
#include "slipstop/controller.hpp"
#include "slipstop/errors.hpp"
#include "slipstop/grasp_model.hpp"
#include "slipstop/nullspace.hpp"
#include "slipstop/qp.hpp"
#include "slipstop/rng.hpp"
#include "slipstop/scenario.hpp"
#include "slipstop/tactile/detector.hpp"
#include "slipstop/tactile/pze.hpp"
#include "slipstop/tactile/pzr.hpp"
#include "oracles.hpp"

using namespace slipstop;

namespace {

std::string scenario_path(const char* name) {
  return std::string(SLIPSTOP_SCENARIO_DIR) + "/" + name;
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d (%s): %s | %s\n", idx, name,
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

struct Instance {
  GraspModel model;
  QPProblem problem;
};

Instance preset_instance(const char* kind) {
  ScenarioConfig cfg;
  PresetParams p;
  p.kind = kind;
  apply_preset(p, &cfg);
  Instance inst;
  inst.model = GraspModel::build(cfg.contacts, cfg.chains, cfg.object_frame);
  inst.problem = assemble_qp(inst.model, nullspace_basis(
                                 inst.model.grasp_matrix),
                             cfg.chains, {});
  return inst;
}

Instance scenario_instance(const char* file) {
  const ScenarioConfig cfg = load_scenario(scenario_path(file));
  Instance inst;
  inst.model = GraspModel::build(cfg.contacts, cfg.chains, cfg.object_frame);
  inst.problem = assemble_qp(inst.model, nullspace_basis(
                                 inst.model.grasp_matrix),
                             cfg.chains, cfg.weights);
  return inst;
}

bool lambda_feasible(const QPProblem& p, const Eigen::VectorXd& lambda,
                     double tol = 1e-8) {
  const Eigen::VectorXd tau = p.torque_rows * lambda;
  for (int j = 0; j < tau.size(); ++j) {
    if (tau[j] < p.tau_min[j] - tol || tau[j] > p.tau_max[j] + tol) {
      return false;
    }
  }
  return ((p.normal_rows * lambda).array() >= -tol).all();
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(SLIPSTOP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

const char* kShipped[] = {
    "fig3_scripted.json",     "fig4_bidigital.json", "fig5_tridigital.json",
    "fig6_low_traction.json", "single_contact.json", "hyperstatic.json",
};

}  // namespace

TEST_CASE("criterion 1: null-space construction on random grasps") {
  const double t0 = now_s();
  Rng rng(2024);
  bool pass = true;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int nc = 1 + static_cast<int>(rng.uniform() * 5.0);
    std::vector<Contact> contacts;
    for (int i = 0; i < nc; ++i) {
      contacts.push_back(Contact::make(
          Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
               rng.uniform(-0.1, 0.1)),
          testing::random_unit(&rng), 0.5, i, 0));
    }
    const Eigen::MatrixXd g = build_grasp_matrix(contacts, Pose{});
    const NullspaceBasis ns = nullspace_basis(g);

    // Dimension cross-checked against an independent rank decomposition.
    const int expected = 3 * nc - testing::qr_rank(g);
    pass = pass && ns.nullity == expected;
    CHECK(ns.nullity == expected);
    for (int k = 0; k < ns.nullity; ++k) {
      const double r = (g * ns.basis.col(k)).norm();
      worst_residual = std::max(worst_residual, r);
      pass = pass && r <= 1e-8;
      CHECK(r <= 1e-8);
    }
  }
  const double elapsed = now_s() - t0;
  pass = pass && elapsed < 1.0;
  CHECK(elapsed < 1.0);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "100 grasps, worst residual %.2e, %.3f s", worst_residual,
                elapsed);
  report(1, "null-space construction", pass, detail);
}

TEST_CASE("criterion 2: solver optimum matches a brute-force grid") {
  const double t0 = now_s();
  bool pass = true;
  std::ostringstream detail;

  struct Case {
    const char* label;
    Instance inst;
  };
  std::vector<Case> cases;
  cases.push_back({"opposed-pair", preset_instance("antipodal")});
  cases.push_back({"tridigital", scenario_instance("fig5_tridigital.json")});

  for (auto& c : cases) {
    const InternalForceProfile sol = solve_internal_qp(c.inst.problem);
    const bool optimal = sol.status == SolveStatus::Optimal;
    const bool feasible = lambda_feasible(c.inst.problem,
                                          sol.raw_coefficients);
    const auto grid = testing::qp_grid_search(c.inst.problem, 200);
    // One-sided: the coarse grid must never beat the solver by more than
    // the acceptance margin (its discretization error runs well above the
    // margin in the other direction).
    const double scale = std::max(1.0, std::abs(grid.best_objective));
    const bool no_better =
        grid.best_objective <= sol.objective_value + 1e-4 * scale;
    pass = pass && optimal && feasible && no_better &&
           grid.feasible_points > 0;
    CHECK(optimal);
    CHECK(feasible);
    CHECK(no_better);
    CHECK(grid.feasible_points > 0);
    detail << c.label << ": solver " << sol.objective_value << " vs grid "
           << grid.best_objective << " (" << grid.feasible_points
           << " feasible pts); ";
  }
  const double elapsed = now_s() - t0;
  pass = pass && elapsed < 30.0;
  CHECK(elapsed < 30.0);
  detail << elapsed << " s";
  report(2, "grid-search cross-check", pass, detail.str());
}

TEST_CASE("criterion 3: reinforcements never disturb the object wrench") {
  bool pass = true;
  int command_total = 0;
  double worst = 0.0;
  for (const char* name : kShipped) {
    const ScenarioConfig cfg = load_scenario(scenario_path(name));
    const TrialResult result = run_trial(cfg);
    for (const CommandRecord& cmd : result.commands) {
      if (!(cmd.alpha > 0.0)) continue;
      REQUIRE(result.profile.has_value());
      const Eigen::VectorXd delta = cmd.alpha * result.profile->direction;
      const double w = (result.model.grasp_matrix * delta).norm();
      worst = std::max(worst, w / cmd.alpha);
      pass = pass && w <= 1e-6 * cmd.alpha;
      CHECK(w <= 1e-6 * cmd.alpha);
      ++command_total;
    }
  }
  pass = pass && command_total > 0;
  CHECK(command_total > 0);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d commands across %d scenarios, worst |G df|/alpha %.2e",
                command_total, 6, worst);
  report(3, "wrench preservation", pass, detail);
}

TEST_CASE("criterion 4: reinforcement solve fits the control budget") {
  const Instance inst = scenario_instance("fig5_tridigital.json");
  REQUIRE(inst.problem.joint_count() == 9);
  REQUIRE(inst.problem.contact_count == 3);

  const InternalForceProfile seed_sol = solve_internal_qp(inst.problem);
  REQUIRE(seed_sol.status == SolveStatus::Optimal);
  const WarmStart warm{seed_sol.raw_coefficients, seed_sol.duals};

  std::vector<double> times;
  times.reserve(1000);
  bool all_optimal = true;
  for (int i = 0; i < 500; ++i) {
    const double t0 = now_s();
    const InternalForceProfile sol = solve_internal_qp(inst.problem);
    times.push_back(now_s() - t0);
    all_optimal = all_optimal && sol.status == SolveStatus::Optimal;
  }
  for (int i = 0; i < 500; ++i) {
    const double t0 = now_s();
    const InternalForceProfile sol =
        solve_internal_qp(inst.problem, {}, warm);
    times.push_back(now_s() - t0);
    all_optimal = all_optimal && sol.status == SolveStatus::Optimal;
  }
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  const double p99 = times[989];
  const double worst = times.back();
  const bool pass = all_optimal && p99 <= 0.010;
  CHECK(all_optimal);
  CHECK(p99 <= 0.010);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "1000 solves (500 cold + 500 warm): median %.3f ms, "
                "p99 %.3f ms, max %.3f ms",
                median * 1e3, p99 * 1e3, worst * 1e3);
  report(4, "solve latency", pass, detail);
}

TEST_CASE("criterion 5: unusable grasps are gated, not commanded") {
  bool pass = true;
  std::ostringstream detail;
  for (const char* name : {"single_contact.json", "hyperstatic.json"}) {
    const ScenarioConfig cfg = load_scenario(scenario_path(name));
    const TrialResult result = run_trial(cfg);
    pass = pass && !result.metrics.applicable &&
           result.metrics.command_count == 0;
    CHECK_FALSE(result.metrics.applicable);
    CHECK(result.metrics.command_count == 0);

    const int run_code = run_cli("run --scenario " + scenario_path(name));
    const int analyze_code =
        run_cli("analyze --scenario " + scenario_path(name));
    pass = pass && run_code == 3 && analyze_code == 3;
    CHECK(run_code == 3);
    CHECK(analyze_code == 3);
    detail << name << ": 0 commands, exit 3/3; ";
  }
  report(5, "applicability gate", pass, detail.str());
}

TEST_CASE("criterion 6: slip is arrested, and the levers act as levers") {
  bool pass = true;
  std::ostringstream detail;

  // Baseline arrest on the three slip scenarios.
  for (const char* name :
       {"fig3_scripted.json", "fig4_bidigital.json",
        "fig5_tridigital.json"}) {
    const ScenarioConfig cfg = load_scenario(scenario_path(name));
    const TrialResult result = run_trial(cfg);
    pass = pass && result.metrics.slip_started && result.metrics.stabilized;
    CHECK(result.metrics.slip_started);
    CHECK(result.metrics.stabilized);
    if (!cfg.scripted) {
      pass = pass && result.metrics.command_count == 1;
      CHECK(result.metrics.command_count == 1);
    }
  }
  detail << "arrest: ok; ";

  // Removing the reinforcement (or the scripted grip ramp) loses the
  // object.
  for (const char* name :
       {"fig4_bidigital.json", "fig5_tridigital.json"}) {
    ScenarioConfig cfg = load_scenario(scenario_path(name));
    cfg.alpha = 0.0;
    const TrialResult result = run_trial(cfg);
    pass = pass && !result.metrics.stabilized;
    CHECK_FALSE(result.metrics.stabilized);
  }
  {
    ScenarioConfig cfg = load_scenario(scenario_path("fig3_scripted.json"));
    cfg.grasp_profile = {{0.0, cfg.grasp_profile.front().force_n}};
    const TrialResult result = run_trial(cfg);
    pass = pass && !result.metrics.stabilized;
    CHECK_FALSE(result.metrics.stabilized);
  }
  detail << "no-action fails: ok; ";

  // Slower reactions slide farther, stronger reinforcements slide less.
  const std::vector<double> latencies = {0.0, 0.05, 0.15, 0.45};
  const std::vector<double> alphas = {7.0, 10.0, 13.0, 16.0};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double prev = -1.0;
    for (double latency : latencies) {
      ScenarioConfig cfg =
          load_scenario(scenario_path("fig4_bidigital.json"));
      cfg.seed = seed;
      cfg.processing_latency_s = latency;
      const TrialResult result = run_trial(cfg);
      const double d = result.metrics.pre_stop_displacement_m;
      pass = pass && result.metrics.stabilized && d >= prev - 1e-12;
      CHECK(result.metrics.stabilized);
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
    double prev_alpha_d = std::numeric_limits<double>::infinity();
    for (double alpha : alphas) {
      ScenarioConfig cfg =
          load_scenario(scenario_path("fig4_bidigital.json"));
      cfg.seed = seed;
      cfg.alpha = alpha;
      const TrialResult result = run_trial(cfg);
      const double d = result.metrics.pre_stop_displacement_m;
      pass = pass && result.metrics.stabilized && d <= prev_alpha_d + 1e-12;
      CHECK(result.metrics.stabilized);
      CHECK(d <= prev_alpha_d + 1e-12);
      prev_alpha_d = d;
    }
  }
  detail << "latency and gain sweeps monotone over 5 seeds";
  report(6, "closed-loop arrest", pass, detail.str());
}

TEST_CASE("criterion 7: detection lands 10-40 ms after onset, no phantoms") {
  VibrationConfig vib;
  DetectorConfig det;
  bool pass = true;
  double min_delay = 1e9, max_delay = -1e9;

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    DetectorConfig cfg = det;
    cfg.onset_threshold =
        calibrate_onset_threshold(vib, det, 2.0, seed + 1000);
    cfg.offset_threshold = cfg.onset_threshold / 2.0;
    BandEnergyDetector detector(cfg);
    VibrationSynth synth(vib, seed);

    // One second of rest, then a 5 mm/s slide.
    const int rest = 10000, slide = 5000;
    double onset_cue = -1.0;
    bool false_positive = false;
    for (int i = 0; i < rest + slide; ++i) {
      const double speed = i < rest ? 0.0 : 0.005;
      const auto cue = detector.push(synth.step(speed, 8.0));
      if (cue && cue->detected) {
        if (cue->timestamp <= 1.0) {
          false_positive = true;
        } else if (onset_cue < 0.0) {
          onset_cue = cue->timestamp;
        }
      }
    }
    const double delay = onset_cue - 1.0;
    min_delay = std::min(min_delay, delay);
    max_delay = std::max(max_delay, delay);
    pass = pass && !false_positive && onset_cue > 0.0 && delay >= 0.010 &&
           delay <= 0.040;
    CHECK_FALSE(false_positive);
    CHECK(delay >= 0.010);
    CHECK(delay <= 0.040);
  }

  // Long quiet stretch on a fresh realization: zero positives.
  {
    DetectorConfig cfg = det;
    cfg.onset_threshold = calibrate_onset_threshold(vib, det, 2.0, 424242);
    cfg.offset_threshold = cfg.onset_threshold / 2.0;
    const auto cues = detect_slip(render_pze(0.0, 8.0, 10.0, 7777, vib),
                                  cfg);
    int positives = 0;
    for (const auto& c : cues) positives += c.detected ? 1 : 0;
    pass = pass && positives == 0;
    CHECK(positives == 0);
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "50 events: delay %.1f-%.1f ms; 10 s baseline: 0 positives",
                min_delay * 1e3, max_delay * 1e3);
  report(7, "detection latency", pass, detail);
}

TEST_CASE("criterion 8: pressure centroids localize contacts under noise") {
  PadGeometry pad;  // stock pad: 2 mm pitch, default noise
  Rng rng(31337);
  std::vector<double> errors;
  errors.reserve(1000);
  int misses = 0;
  for (int i = 0; i < 1000; ++i) {
    const double cx = rng.uniform(0.0, 7.0);
    const double cy = rng.uniform(0.0, 7.0);
    const Eigen::Vector3d truth(cx * pad.pitch_m, cy * pad.pitch_m, 0.0);
    const Contact c = Contact::make(truth, {0.0, 0.0, 1.0}, 0.5, 0, 0);
    const PzRFrame frame = render_pzr(c, {5.0, 0.0, 0.0}, pad, &rng);
    const auto est = estimate_contact(frame, pad);
    if (!est) {
      ++misses;
      continue;
    }
    errors.push_back((est->first - truth).norm());
  }
  REQUIRE_FALSE(errors.empty());
  std::sort(errors.begin(), errors.end());
  const double median = errors[errors.size() / 2];
  const bool pass = misses == 0 && median < 1e-3;
  CHECK(misses == 0);
  CHECK(median < 1e-3);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "1000 contacts: median error %.3f mm, worst %.3f mm, "
                "%d misses",
                median * 1e3, errors.back() * 1e3, misses);
  report(8, "contact localization", pass, detail);
}

TEST_CASE("criterion 9: trials are bitwise reproducible") {
  bool pass = true;
  std::ostringstream detail;
  for (const char* name : {"fig3_scripted.json", "fig4_bidigital.json"}) {
    const ScenarioConfig cfg = load_scenario(scenario_path(name));
    const TrialResult a = run_trial(cfg);
    const TrialResult b = run_trial(cfg);
    std::ostringstream sa, sb;
    write_trace(a, sa);
    write_trace(b, sb);
    const bool identical = sa.str() == sb.str();
    pass = pass && identical && !sa.str().empty();
    CHECK(identical);
    detail << name << ": " << sa.str().size() << " bytes identical; ";
  }
  {
    ScenarioConfig cfg = load_scenario(scenario_path("fig4_bidigital.json"));
    const TrialResult a = run_trial(cfg);
    cfg.seed += 1;
    const TrialResult c = run_trial(cfg);
    std::ostringstream sa, sc;
    write_trace(a, sa);
    write_trace(c, sc);
    pass = pass && sa.str() != sc.str();
    CHECK(sa.str() != sc.str());
    detail << "seed change alters the trace";
  }
  report(9, "determinism", pass, detail.str());
}
