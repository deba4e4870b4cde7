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

// slipstop: grasp analysis and reactive slip-control bench.
//
//   slipstop analyze --scenario s.json
//   slipstop run     --scenario s.json [--seed N] [--trace out.csv]
//   slipstop batch   --scenario s.json [--seed N] [--n K] [--jobs J]
//                    [--sweep key.path=v1,v2,...] [--metrics out.csv]
//
// Exit codes: 0 success (grasp held or was reinforced to a stop), 2 invalid
// scenario, 3 reactive control not applicable to the grasp, 4 slip was never
// arrested, 5 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slipstop/bench/trial.hpp"
#include "slipstop/controller.hpp"
#include "slipstop/errors.hpp"
#include "slipstop/nullspace.hpp"
#include "slipstop/qp.hpp"
#include "slipstop/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidScenario = 2;
constexpr int kExitNotApplicable = 3;
constexpr int kExitNotArrested = 4;
constexpr int kExitIo = 5;

using slipstop::ScenarioConfig;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw slipstop::Error("cannot open file: " + path);
  }
  nlohmann::json j;
  in >> j;
  return j;
}

// One --sweep flag: a dotted key path and the values to try.
struct Sweep {
  std::string pointer;  // JSON pointer form, "/sim/object_mass_kg"
  std::string key;      // original dotted form for naming
  std::vector<nlohmann::json> values;
};

Sweep parse_sweep(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= arg.size()) {
    throw slipstop::ScenarioInvalid("--sweep expects key.path=v1,v2,...: " +
                                    arg);
  }
  Sweep s;
  s.key = arg.substr(0, eq);
  s.pointer = "/" + s.key;
  for (char& c : s.pointer) {
    if (c == '.') c = '/';
  }
  std::stringstream vals(arg.substr(eq + 1));
  std::string tok;
  while (std::getline(vals, tok, ',')) {
    if (tok.empty()) continue;
    try {
      s.values.push_back(nlohmann::json::parse(tok));
    } catch (const nlohmann::json::exception&) {
      s.values.push_back(tok);  // bare string value
    }
  }
  if (s.values.empty()) {
    throw slipstop::ScenarioInvalid("--sweep has no values: " + arg);
  }
  return s;
}

// Expands the cartesian product of all sweeps over the base document.
std::vector<ScenarioConfig> expand_sweeps(const nlohmann::json& base,
                                          const std::vector<Sweep>& sweeps) {
  std::vector<nlohmann::json> docs{base};
  std::vector<std::string> tags{""};
  for (const Sweep& s : sweeps) {
    std::vector<nlohmann::json> next_docs;
    std::vector<std::string> next_tags;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (const nlohmann::json& v : s.values) {
        nlohmann::json doc = docs[i];
        doc[nlohmann::json::json_pointer(s.pointer)] = v;
        next_docs.push_back(std::move(doc));
        next_tags.push_back(tags[i] + "[" + s.key + "=" + v.dump() + "]");
      }
    }
    docs = std::move(next_docs);
    tags = std::move(next_tags);
  }
  std::vector<ScenarioConfig> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ScenarioConfig cfg = slipstop::scenario_from_json(docs[i]);
    cfg.name += tags[i];
    out.push_back(std::move(cfg));
  }
  return out;
}

void print_classification(const slipstop::GraspClass& gc,
                          const slipstop::NullspaceBasis& ns) {
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  std::printf("classification: graspable=%s defective=%s hyperstatic=%s\n",
              yn(gc.graspable), yn(gc.defective), yn(gc.hyperstatic));
  std::printf("internal-force space: dim %d (J^T rank %d)\n", ns.nullity,
              ns.rank);
  std::printf("reactive control applicable: %s\n", yn(gc.rsc_applicable));
}

int cmd_analyze(const ScenarioConfig& cfg) {
  const slipstop::GraspModel model =
      slipstop::GraspModel::build(cfg.contacts, cfg.chains, cfg.object_frame,
                                  0.0);
  const slipstop::GraspClass gc =
      slipstop::classify_grasp(model.grasp_matrix, model.hand_jacobian);

  std::printf("scenario: %s\n", cfg.name.c_str());
  std::printf("contacts: %zu  joints: %d\n", model.contacts.size(),
              static_cast<int>(model.hand_jacobian.cols()));

  slipstop::NullspaceBasis ns =
      slipstop::nullspace_basis(model.grasp_matrix);
  print_classification(gc, ns);
  if (!gc.rsc_applicable) {
    std::printf("no internal-force reinforcement exists for this grasp\n");
    return kExitNotApplicable;
  }

  const slipstop::QPProblem problem =
      slipstop::assemble_qp(model, ns, cfg.chains, cfg.weights);
  const slipstop::InternalForceProfile profile =
      slipstop::solve_internal_qp(problem);

  std::printf("\n%s", slipstop::dump_diagnostics(problem, profile).c_str());

  if (profile.status == slipstop::SolveStatus::Optimal) {
    // Per-finger normal split of the optimized direction.
    std::printf("\nunit reinforcement direction per contact:\n");
    double fn_min = std::numeric_limits<double>::infinity();
    double fn_max = 0.0;
    for (std::size_t k = 0; k < model.contacts.size(); ++k) {
      const double fn = profile.direction[3 * k];
      const double ft = std::hypot(profile.direction[3 * k + 1],
                                   profile.direction[3 * k + 2]);
      fn_min = std::min(fn_min, fn);
      fn_max = std::max(fn_max, fn);
      std::printf("  contact %zu (finger %d): normal %+.6f  tangential %.6f\n",
                  k, model.contacts[k].finger_id, fn, ft);
    }
    if (model.contacts.size() == 3 && fn_min > 0.0) {
      std::printf("opposition balance (largest/smallest normal): %.4f\n",
                  fn_max / fn_min);
    }
    const slipstop::ContactForceVector baseline = cfg.baseline_force_vector();
    const Eigen::VectorXd tau_base =
        model.hand_jacobian.transpose() * baseline;
    Eigen::VectorXd tau_min(tau_base.size()), tau_max(tau_base.size());
    int j = 0;
    for (const auto& chain : cfg.chains) {
      for (const auto& joint : chain.joints) {
        tau_min[j] = joint.tau_min;
        tau_max[j] = joint.tau_max;
        ++j;
      }
    }
    const double alpha_cap = slipstop::cap_alpha(
        std::numeric_limits<double>::max(), profile, model.hand_jacobian,
        tau_base, tau_min, tau_max);
    std::printf("largest torque-feasible gain from baseline: %.4f\n",
                alpha_cap);
  }
  return kExitOk;
}

int cmd_run(const ScenarioConfig& cfg, const std::string& trace_path) {
  const slipstop::TrialResult result = slipstop::run_trial(cfg);
  if (!trace_path.empty()) {
    slipstop::write_trace_file(result, trace_path);
  }

  const slipstop::TrialMetrics& m = result.metrics;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  std::printf("scenario: %s  seed: %llu\n", cfg.name.c_str(),
              static_cast<unsigned long long>(cfg.seed));
  std::printf("applicable: %s  slip: %s  stabilized: %s  limit hit: %s\n",
              yn(m.applicable), yn(m.slip_started), yn(m.stabilized),
              yn(m.slide_limit_hit));
  std::printf("onset detection delay: %.6f s\n", m.onset_detection_delay_s);
  std::printf("reaction to stop: %.6f s\n", m.reaction_to_stop_delay_s);
  std::printf("pre-stop displacement: %.6f m\n", m.pre_stop_displacement_m);
  std::printf("total displacement: %.6f m\n", m.total_displacement_m);
  std::printf("commands issued: %d\n", m.command_count);
  std::printf("calibrated onset threshold: %.6g\n",
              result.onset_threshold_used);

  if (!cfg.scripted && !m.applicable) return kExitNotApplicable;
  if (!m.stabilized) return kExitNotArrested;
  return kExitOk;
}

int cmd_batch(const std::vector<ScenarioConfig>& scenarios,
              std::uint64_t seed0, int n, int jobs,
              const std::string& metrics_path) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) seeds[i] = seed0 + static_cast<std::uint64_t>(i);

  const std::vector<slipstop::BatchRow> rows =
      slipstop::run_batch(scenarios, seeds, jobs);
  if (metrics_path.empty()) {
    slipstop::write_metrics(rows, std::cout);
  } else {
    slipstop::write_metrics_file(rows, metrics_path);
  }

  int failures = 0;
  int unarrested = 0;
  for (const auto& row : rows) {
    if (row.failed) {
      ++failures;
      std::fprintf(stderr, "trial %s seed %llu failed: %s\n",
                   row.scenario.c_str(),
                   static_cast<unsigned long long>(row.seed),
                   row.error.c_str());
    } else if (!row.metrics.stabilized) {
      ++unarrested;
    }
  }
  std::fprintf(stderr, "batch: %zu trials, %d failed, %d not stabilized\n",
               rows.size(), failures, unarrested);
  return (failures > 0 || unarrested > 0) ? kExitNotArrested : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grasp analysis and reactive slip-control bench"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string trace_path;
  std::string metrics_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int n_seeds = 10;
  int jobs = 1;
  std::vector<std::string> sweep_args;

  CLI::App* analyze = app.add_subcommand("analyze", "classify the grasp and solve the reinforcement program");
  CLI::App* run = app.add_subcommand("run", "run one closed-loop (or scripted) trial");
  CLI::App* batch = app.add_subcommand("batch", "run a seed sweep and aggregate metrics");

  for (CLI::App* sub : {analyze, run, batch}) {
    sub->add_option("--scenario", scenario_path, "scenario JSON file")
        ->required();
  }
  run->add_option("--trace", trace_path, "write the trial time series CSV");
  run->add_option("--seed", seed, "override the scenario seed")
      ->each([&](const std::string&) { seed_given = true; });
  batch->add_option("--seed", seed, "first seed of the sweep")
      ->each([&](const std::string&) { seed_given = true; });
  batch->add_option("--n", n_seeds, "number of seeds")
      ->check(CLI::PositiveNumber);
  batch->add_option("--jobs", jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  batch->add_option("--sweep", sweep_args,
                    "key.path=v1,v2,... scenario field sweep (repeatable)");
  batch->add_option("--metrics", metrics_path, "write aggregated metrics CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    const nlohmann::json doc = read_json_file(scenario_path);

    if (app.got_subcommand(analyze)) {
      return cmd_analyze(slipstop::scenario_from_json(doc));
    }
    if (app.got_subcommand(run)) {
      ScenarioConfig cfg = slipstop::scenario_from_json(doc);
      if (seed_given) cfg.seed = seed;
      return cmd_run(cfg, trace_path);
    }
    // batch
    std::vector<Sweep> sweeps;
    for (const std::string& arg : sweep_args) sweeps.push_back(parse_sweep(arg));
    const std::vector<ScenarioConfig> scenarios = expand_sweeps(doc, sweeps);
    const std::uint64_t seed0 =
        seed_given ? seed : scenarios.front().seed;
    return cmd_batch(scenarios, seed0, n_seeds, jobs, metrics_path);
  } catch (const slipstop::ScenarioInvalid& e) {
    std::fprintf(stderr, "invalid scenario: %s\n", e.what());
    return kExitInvalidScenario;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "invalid scenario: %s\n", e.what());
    return kExitInvalidScenario;
  } catch (const slipstop::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
}
