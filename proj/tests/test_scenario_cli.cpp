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

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "slipstop/errors.hpp"
#include "slipstop/scenario.hpp"

using namespace slipstop;

namespace {

std::string scenario_path(const char* name) {
  return std::string(SLIPSTOP_SCENARIO_DIR) + "/" + name;
}

const char* kShipped[] = {
    "fig3_scripted.json",    "fig4_bidigital.json", "fig5_tridigital.json",
    "fig6_low_traction.json", "single_contact.json", "hyperstatic.json",
};

// Runs the command under the built CLI binary; returns the exit code.
int run_cli(const std::string& args, const std::string& out_file = "") {
  std::string cmd = std::string(SLIPSTOP_CLI_PATH) + " " + args;
  if (!out_file.empty()) {
    cmd += " > " + out_file + " 2>&1";
  } else {
    cmd += " > /dev/null 2>&1";
  }
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("every shipped scenario validates and survives a save/load trip") {
  for (const char* name : kShipped) {
    CAPTURE(name);
    const ScenarioConfig cfg = load_scenario(scenario_path(name));
    CHECK_NOTHROW(validate_scenario(cfg));

    const std::string tmp =
        std::string("/tmp/roundtrip_") + name;
    save_scenario(cfg, tmp);
    const ScenarioConfig back = load_scenario(tmp);
    CHECK(scenario_to_json(cfg) == scenario_to_json(back));
    std::remove(tmp.c_str());
  }
}

TEST_CASE("presets expand to the explicit form on save") {
  ScenarioConfig cfg;
  PresetParams p;
  p.kind = "tridigital";
  apply_preset(p, &cfg);
  cfg.name = "expanded";
  cfg.traction_profile = {{0.0, 1.0}};
  const nlohmann::json j = scenario_to_json(cfg);
  CHECK(j.contains("contacts"));
  CHECK(j.contains("chains"));
  CHECK_FALSE(j.contains("preset"));
  CHECK(j["contacts"].size() == 3);
}

TEST_CASE("validation rejects ill-formed configurations") {
  const ScenarioConfig good = load_scenario(scenario_path(
      "fig4_bidigital.json"));
  CHECK_NOTHROW(validate_scenario(good));

  {
    ScenarioConfig bad = good;
    bad.traction_profile.clear();
    CHECK_THROWS_AS(validate_scenario(bad), ScenarioInvalid);
  }
  {
    ScenarioConfig bad = good;
    std::swap(bad.contacts[0], bad.contacts[1]);  // breaks canonical order
    CHECK_THROWS_AS(validate_scenario(bad), ScenarioInvalid);
  }
  {
    ScenarioConfig bad = good;
    bad.dt_s = 2.0 / bad.vibration.sample_rate_hz;
    CHECK_THROWS_AS(validate_scenario(bad), ScenarioInvalid);
  }
  {
    ScenarioConfig bad = good;
    bad.detector.sample_rate_hz = bad.vibration.sample_rate_hz * 2.0;
    CHECK_THROWS_AS(validate_scenario(bad), ScenarioInvalid);
  }
  {
    ScenarioConfig bad = good;
    bad.duration_s = 0.0;
    CHECK_THROWS_AS(validate_scenario(bad), ScenarioInvalid);
  }
  {
    ScenarioConfig bad = good;
    bad.baseline_normals = Eigen::VectorXd::Constant(5, 3.0);
    CHECK_THROWS_AS(validate_scenario(bad), ScenarioInvalid);
  }
  {
    ScenarioConfig bad = good;
    bad.trace_decimation = 0;
    CHECK_THROWS_AS(validate_scenario(bad), ScenarioInvalid);
  }
}

TEST_CASE("scenario json requires geometry exactly one way") {
  nlohmann::json j;
  j["name"] = "conflicted";
  j["preset"] = {{"kind", "antipodal"}};
  j["contacts"] = nlohmann::json::array();
  j["traction_profile"] = {{{"t_s", 0.0}, {"force_N", 1.0}}};
  CHECK_THROWS_AS(scenario_from_json(j), ScenarioInvalid);

  nlohmann::json none;
  none["name"] = "geometry-free";
  none["traction_profile"] = {{{"t_s", 0.0}, {"force_N", 1.0}}};
  CHECK_THROWS_AS(scenario_from_json(none), ScenarioInvalid);
}

TEST_CASE("cli: analyze succeeds on a workable grasp") {
  const int code = run_cli("analyze --scenario " +
                               scenario_path("fig4_bidigital.json"),
                           "/tmp/cli_analyze.txt");
  CHECK(code == 0);
  const std::string out = slurp("/tmp/cli_analyze.txt");
  CHECK(out.find("classification") != std::string::npos);
  CHECK(out.find("status: Optimal") != std::string::npos);
  std::remove("/tmp/cli_analyze.txt");
}

TEST_CASE("cli: grasps outside the applicability gate exit with 3") {
  CHECK(run_cli("analyze --scenario " +
                scenario_path("single_contact.json")) == 3);
  CHECK(run_cli("analyze --scenario " + scenario_path("hyperstatic.json")) ==
        3);
  CHECK(run_cli("run --scenario " + scenario_path("single_contact.json")) ==
        3);
  CHECK(run_cli("run --scenario " + scenario_path("hyperstatic.json")) == 3);
}

TEST_CASE("cli: run reports a stabilized trial and writes the trace") {
  const std::string trace = "/tmp/cli_trace.csv";
  const int code =
      run_cli("run --scenario " + scenario_path("fig4_bidigital.json") +
                  " --trace " + trace,
              "/tmp/cli_run.txt");
  CHECK(code == 0);
  const std::string out = slurp("/tmp/cli_run.txt");
  CHECK(out.find("stabilized: yes") != std::string::npos);

  std::ifstream tf(trace);
  REQUIRE(tf.good());
  std::string header;
  std::getline(tf, header);
  CHECK(header.rfind("t_s,traction_N,object_pos_m,object_vel_mps", 0) == 0);
  CHECK(header.find("slip_ground_truth") != std::string::npos);
  CHECK(header.find("tau_cmd0_Nm") != std::string::npos);
  std::remove(trace.c_str());
  std::remove("/tmp/cli_run.txt");
}

TEST_CASE("cli: missing and malformed inputs use distinct exit codes") {
  CHECK(run_cli("run --scenario /tmp/does_not_exist.json") == 5);
  {
    std::ofstream bad("/tmp/cli_corrupt.json");
    bad << "{ not json";
  }
  CHECK(run_cli("run --scenario /tmp/cli_corrupt.json") == 2);
  {
    // Well-formed JSON that fails validation.
    std::ofstream bad("/tmp/cli_invalid.json");
    bad << "{\"name\":\"x\",\"preset\":{\"kind\":\"antipodal\"}}";
  }
  CHECK(run_cli("run --scenario /tmp/cli_invalid.json") == 2);
  std::remove("/tmp/cli_corrupt.json");
  std::remove("/tmp/cli_invalid.json");
}

TEST_CASE("cli: an overwhelming pull ends in the not-arrested exit code") {
  ScenarioConfig cfg = load_scenario(scenario_path("fig4_bidigital.json"));
  // Traction far beyond any reachable grasp capacity: the slide-limit
  // guard must end the trial and the process must say so.
  for (auto& knot : cfg.traction_profile) {
    if (knot.force_n > 5.0) knot.force_n = 60.0;
  }
  cfg.name = "overwhelming";
  save_scenario(cfg, "/tmp/cli_overwhelming.json");
  CHECK(run_cli("run --scenario /tmp/cli_overwhelming.json") == 4);
  std::remove("/tmp/cli_overwhelming.json");
}

TEST_CASE("cli: batch writes per-seed rows plus aggregates") {
  const std::string csv = "/tmp/cli_batch.csv";
  const int code =
      run_cli("batch --scenario " + scenario_path("fig4_bidigital.json") +
                  " --seed 1 --n 3 --jobs 2 --metrics " + csv,
              "/tmp/cli_batch_log.txt");
  CHECK(code == 0);
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("scenario,seed,failed", 0) == 0);
  int rows = 0;
  bool saw_mean = false, saw_std = false;
  while (std::getline(in, line)) {
    if (line.rfind("mean,", 0) == 0) {
      saw_mean = true;
    } else if (line.rfind("std,", 0) == 0) {
      saw_std = true;
    } else if (!line.empty()) {
      ++rows;
    }
  }
  CHECK(rows == 3);
  CHECK(saw_mean);
  CHECK(saw_std);
  std::remove(csv.c_str());
  std::remove("/tmp/cli_batch_log.txt");
}

TEST_CASE("cli: sweep expands into named variants; weak legs taint the exit") {
  const std::string csv = "/tmp/cli_sweep.csv";
  // Decelerating a pull T mid-slide needs mu_k * (16 + alpha*sqrt(2)) > T,
  // i.e. alpha > (T/0.4 - 16)/sqrt(2): ~8.1 at the top of the randomized
  // pull range. The alpha=6 leg must lose at least one draw and taint the
  // exit code; alpha=12 clears the whole range.
  const int code = run_cli(
      "batch --scenario " + scenario_path("fig4_bidigital.json") +
          " --seed 1 --n 2 --jobs 2 --sweep control.alpha=6,12 --metrics " +
          csv,
      "/tmp/cli_sweep_log.txt");
  CHECK(code == 4);
  const std::string text = slurp(csv);
  CHECK(text.find("[control.alpha=6]") != std::string::npos);
  CHECK(text.find("[control.alpha=12]") != std::string::npos);

  std::istringstream is(text);
  std::string line;
  std::getline(is, line);  // header
  int weak_not_stabilized = 0, strong_stabilized = 0;
  while (std::getline(is, line)) {
    if (line.rfind("mean,", 0) == 0 || line.rfind("std,", 0) == 0) continue;
    // stabilized is column 6 (0-based 5).
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(cell);
    REQUIRE(cols.size() >= 7);
    if (line.find("[control.alpha=6]") != std::string::npos) {
      weak_not_stabilized += cols[5] == "0" ? 1 : 0;
    } else {
      strong_stabilized += cols[5] == "1" ? 1 : 0;
    }
  }
  CHECK(weak_not_stabilized >= 1);
  CHECK(strong_stabilized == 2);
  std::remove(csv.c_str());
  std::remove("/tmp/cli_sweep_log.txt");
}

TEST_CASE("cli: repeated runs emit byte-identical traces") {
  const std::string a = "/tmp/cli_det_a.csv";
  const std::string b = "/tmp/cli_det_b.csv";
  const std::string base = scenario_path("fig4_bidigital.json");
  REQUIRE(run_cli("run --scenario " + base + " --trace " + a) == 0);
  REQUIRE(run_cli("run --scenario " + base + " --trace " + b) == 0);
  CHECK(slurp(a) == slurp(b));

  const std::string c = "/tmp/cli_det_c.csv";
  REQUIRE(run_cli("run --scenario " + base + " --seed 99 --trace " + c) ==
          0);
  CHECK(slurp(a) != slurp(c));
  std::remove(a.c_str());
  std::remove(b.c_str());
  std::remove(c.c_str());
}
