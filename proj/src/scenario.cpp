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

#include "slipstop/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "slipstop/errors.hpp"

namespace slipstop {

namespace {

using nlohmann::json;

json vec3_to_json(const Eigen::Vector3d& v) {
  return json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d json_to_vec3(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) {
    throw ScenarioInvalid(std::string(key) + ": expected a 3-element array");
  }
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(),
                         j[2].get<double>());
}

json mat3_to_json(const Mat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  }
  return out;
}

Mat3 json_to_mat3(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 9) {
    throw ScenarioInvalid(std::string(key) +
                          ": expected a 9-element row-major array");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
  }
  return m;
}

std::vector<TractionKnot> json_to_profile(const json& j, const char* key) {
  std::vector<TractionKnot> out;
  if (!j.is_array()) {
    throw ScenarioInvalid(std::string(key) + ": expected an array of knots");
  }
  for (const auto& k : j) {
    out.push_back({k.at("t_s").get<double>(), k.at("force_N").get<double>()});
  }
  return out;
}

json profile_to_json(const std::vector<TractionKnot>& knots) {
  json out = json::array();
  for (const auto& k : knots) {
    out.push_back({{"t_s", k.t_s}, {"force_N", k.force_n}});
  }
  return out;
}

std::optional<RangeSpec> json_to_range(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2) {
    throw ScenarioInvalid(std::string(key) + ": expected [lo, hi]");
  }
  return RangeSpec{r[0].get<double>(), r[1].get<double>()};
}

void range_to_json(json* j, const char* key,
                   const std::optional<RangeSpec>& r) {
  if (r) (*j)[key] = json::array({r->lo, r->hi});
}

// Serial curl finger: joints stacked below the contact along `back`, all
// rotating about `axis`, so that a unit normal force at the fingertip
// loads joint j with torque (n_joints - j) * spacing.
FingerChain make_curl_finger(int finger_id, const Vec3& tip,
                             const Vec3& back, const Vec3& axis, int n_joints,
                             double spacing, double tip_force_limit) {
  FingerChain chain;
  chain.finger_id = finger_id;
  for (int j = 0; j < n_joints; ++j) {
    RevoluteJoint joint;
    joint.axis = axis;
    joint.origin = tip + (n_joints - j) * spacing * back;
    const double lever = (n_joints - j) * spacing;
    joint.tau_max = tip_force_limit * lever;
    joint.tau_min = -joint.tau_max;
    chain.joints.push_back(joint);
    chain.link_lengths.push_back(spacing);
  }
  return chain;
}

}  // namespace

void apply_preset(const PresetParams& p, ScenarioConfig* cfg) {
  cfg->contacts.clear();
  cfg->chains.clear();
  cfg->object_frame = Pose{};
  cfg->pull_axis = Vec3::UnitZ();
  const double r = p.radius_m;
  const double h = p.phalanx_spacing_m;
  const int nj = p.joints_per_finger;
  const int tip = nj - 1;

  if (p.kind == "antipodal" || p.kind == "hyperstatic") {
    const Vec3 p0(r, 0.0, 0.0), p1(-r, 0.0, 0.0);
    const Vec3 n0(-1.0, 0.0, 0.0), n1(1.0, 0.0, 0.0);
    cfg->contacts.push_back(Contact::make(p0, n0, p.mu, 0, tip));
    cfg->contacts.push_back(Contact::make(p1, n1, p.mu, 1, tip));
    if (p.kind == "antipodal") {
      cfg->chains.push_back(make_curl_finger(0, p0, -Vec3::UnitY(),
                                             Vec3::UnitZ(), nj, h,
                                             p.fingertip_limit_n));
      cfg->chains.push_back(make_curl_finger(1, p1, Vec3::UnitY(),
                                             Vec3::UnitZ(), nj, h,
                                             p.fingertip_limit_n));
    } else {
      // Joint origins on the contact-normal line: the squeeze direction
      // needs no torque at all, which makes the grasp hyperstatic.
      cfg->chains.push_back(make_curl_finger(0, p0, Vec3::UnitX(),
                                             Vec3::UnitZ(), nj, h,
                                             p.fingertip_limit_n));
      cfg->chains.push_back(make_curl_finger(1, p1, -Vec3::UnitX(),
                                             Vec3::UnitZ(), nj, h,
                                             p.fingertip_limit_n));
    }
  } else if (p.kind == "tridigital") {
    const double angles_deg[3] = {140.0, -140.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      const double th = angles_deg[i] * M_PI / 180.0;
      const Vec3 pos(r * std::cos(th), r * std::sin(th), 0.0);
      const Vec3 normal(-std::cos(th), -std::sin(th), 0.0);
      const Vec3 back(std::sin(th), -std::cos(th), 0.0);
      cfg->contacts.push_back(Contact::make(pos, normal, p.mu, i, tip));
      cfg->chains.push_back(make_curl_finger(i, pos, back, Vec3::UnitZ(), nj,
                                             h, p.fingertip_limit_n));
    }
  } else if (p.kind == "single_contact") {
    const Vec3 p0(r, 0.0, 0.0);
    cfg->contacts.push_back(
        Contact::make(p0, Vec3(-1.0, 0.0, 0.0), p.mu, 0, tip));
    cfg->chains.push_back(make_curl_finger(0, p0, -Vec3::UnitY(),
                                           Vec3::UnitZ(), nj, h,
                                           p.fingertip_limit_n));
  } else {
    throw ScenarioInvalid("unknown preset kind: " + p.kind);
  }
}

ContactForceVector ScenarioConfig::baseline_force_vector() const {
  ContactForceVector f = ContactForceVector::Zero(3 * contacts.size());
  for (int i = 0; i < baseline_normals.size(); ++i) {
    f[3 * i] = baseline_normals[i];
  }
  return f;
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig cfg;
  try {
    cfg.name = j.value("name", std::string());

    if (j.contains("preset")) {
      if (j.contains("contacts") || j.contains("chains")) {
        throw ScenarioInvalid(
            "give either a preset or explicit contacts/chains, not both");
      }
      const auto& pj = j.at("preset");
      PresetParams p;
      p.kind = pj.value("kind", p.kind);
      p.radius_m = pj.value("radius_m", p.radius_m);
      p.mu = pj.value("mu", p.mu);
      p.joints_per_finger = pj.value("joints_per_finger",
                                     p.joints_per_finger);
      p.phalanx_spacing_m = pj.value("phalanx_spacing_m",
                                     p.phalanx_spacing_m);
      p.fingertip_limit_n = pj.value("fingertip_limit_N",
                                     p.fingertip_limit_n);
      apply_preset(p, &cfg);
    } else {
      for (const auto& cj : j.at("contacts")) {
        cfg.contacts.push_back(Contact::make(
            json_to_vec3(cj.at("position_m"), "position_m"),
            json_to_vec3(cj.at("normal"), "normal"), cj.at("mu").get<double>(),
            cj.at("finger_id").get<int>(), cj.at("phalanx_id").get<int>()));
      }
      for (const auto& hj : j.at("chains")) {
        FingerChain chain;
        chain.finger_id = hj.at("finger_id").get<int>();
        if (hj.contains("link_lengths_m")) {
          chain.link_lengths =
              hj.at("link_lengths_m").get<std::vector<double>>();
        }
        for (const auto& jj : hj.at("joints")) {
          RevoluteJoint joint;
          joint.axis = json_to_vec3(jj.at("axis"), "axis");
          joint.origin = json_to_vec3(jj.at("origin_m"), "origin_m");
          joint.angle = jj.value("angle_rad", 0.0);
          joint.tau_min = jj.at("tau_min_Nm").get<double>();
          joint.tau_max = jj.at("tau_max_Nm").get<double>();
          chain.joints.push_back(joint);
        }
        cfg.chains.push_back(std::move(chain));
      }
      if (j.contains("object_frame")) {
        const auto& fj = j.at("object_frame");
        cfg.object_frame.origin = json_to_vec3(fj.at("origin_m"), "origin_m");
        cfg.object_frame.rotation = json_to_mat3(fj.at("rotation"),
                                                 "rotation");
      }
      if (j.contains("pull_axis")) {
        cfg.pull_axis = json_to_vec3(j.at("pull_axis"), "pull_axis");
      }
    }

    const double axis_norm = cfg.pull_axis.norm();
    if (axis_norm < 1e-9) throw ScenarioInvalid("pull_axis is zero");
    cfg.pull_axis /= axis_norm;

    const auto& bj = j.at("baseline_normals_N");
    if (bj.is_number()) {
      cfg.baseline_normals =
          Eigen::VectorXd::Constant(cfg.contacts.size(), bj.get<double>());
    } else {
      cfg.baseline_normals.resize(bj.size());
      for (std::size_t i = 0; i < bj.size(); ++i) {
        cfg.baseline_normals[i] = bj[i].get<double>();
      }
    }

    if (j.contains("sim")) {
      const auto& sj = j.at("sim");
      cfg.object_mass_kg = sj.value("object_mass_kg", cfg.object_mass_kg);
      cfg.mu_kinetic_ratio = sj.value("mu_kinetic_ratio",
                                      cfg.mu_kinetic_ratio);
      cfg.v_eps_mps = sj.value("v_eps_mps", cfg.v_eps_mps);
      cfg.dt_s = sj.value("dt_s", cfg.dt_s);
      cfg.duration_s = sj.value("duration_s", cfg.duration_s);
      cfg.slide_limit_m = sj.value("slide_limit_m", cfg.slide_limit_m);
      cfg.trace_decimation = sj.value("trace_decimation",
                                      cfg.trace_decimation);
    }

    cfg.traction_profile = json_to_profile(j.at("traction_profile"),
                                           "traction_profile");
    if (j.contains("grasp_profile")) {
      cfg.grasp_profile = json_to_profile(j.at("grasp_profile"),
                                          "grasp_profile");
    }

    if (j.contains("control")) {
      const auto& kj = j.at("control");
      const std::string policy = kj.value("policy", std::string("scripted"));
      if (policy == "scripted") {
        cfg.scripted = true;
      } else if (policy == "single_step") {
        cfg.scripted = false;
        cfg.policy = ReinforcePolicy::SingleStep;
      } else if (policy == "progressive") {
        cfg.scripted = false;
        cfg.policy = ReinforcePolicy::Progressive;
      } else {
        throw ScenarioInvalid("unknown control policy: " + policy);
      }
      cfg.alpha = kj.value("alpha", cfg.alpha);
      cfg.ramp_duration_s = kj.value("ramp_duration_s", cfg.ramp_duration_s);
      cfg.processing_latency_s = kj.value("processing_latency_s",
                                          cfg.processing_latency_s);
      cfg.refractory_s = kj.value("refractory_s", cfg.refractory_s);
      cfg.stabilize_hold_s = kj.value("stabilize_hold_s",
                                      cfg.stabilize_hold_s);
      if (kj.contains("staleness_bound_s")) {
        cfg.staleness_bound_s = kj.at("staleness_bound_s").get<double>();
      }
    } else {
      cfg.scripted = true;
    }

    if (j.contains("qp_weights")) {
      const auto& wj = j.at("qp_weights");
      cfg.weights.normal_sum = wj.value("normal_sum",
                                        cfg.weights.normal_sum);
      cfg.weights.tangential = wj.value("tangential",
                                        cfg.weights.tangential);
      cfg.weights.variance = wj.value("variance", cfg.weights.variance);
    }

    if (j.contains("vibration")) {
      const auto& vj = j.at("vibration");
      cfg.vibration.sample_rate_hz = vj.value("sample_rate_Hz",
                                              cfg.vibration.sample_rate_hz);
      cfg.vibration.baseline_amplitude =
          vj.value("baseline_amplitude", cfg.vibration.baseline_amplitude);
      cfg.vibration.baseline_low_hz = vj.value("baseline_low_Hz",
                                               cfg.vibration.baseline_low_hz);
      cfg.vibration.baseline_high_hz =
          vj.value("baseline_high_Hz", cfg.vibration.baseline_high_hz);
      cfg.vibration.slip_gain = vj.value("slip_gain", cfg.vibration.slip_gain);
      cfg.vibration.slip_band_low_hz =
          vj.value("slip_band_low_Hz", cfg.vibration.slip_band_low_hz);
      cfg.vibration.slip_band_high_hz =
          vj.value("slip_band_high_Hz", cfg.vibration.slip_band_high_hz);
      cfg.vibration.transient_gain = vj.value("transient_gain",
                                              cfg.vibration.transient_gain);
      cfg.vibration.transient_cutoff_hz =
          vj.value("transient_cutoff_Hz", cfg.vibration.transient_cutoff_hz);
    }

    if (j.contains("detector")) {
      const auto& dj = j.at("detector");
      cfg.detector.window_samples = dj.value("window_samples",
                                             cfg.detector.window_samples);
      cfg.detector.hop_samples = dj.value("hop_samples",
                                          cfg.detector.hop_samples);
      cfg.detector.sample_rate_hz = dj.value("sample_rate_Hz",
                                             cfg.detector.sample_rate_hz);
      cfg.detector.band_low_hz = dj.value("band_low_Hz",
                                          cfg.detector.band_low_hz);
      cfg.detector.band_high_hz = dj.value("band_high_Hz",
                                           cfg.detector.band_high_hz);
      cfg.detector.onset_threshold = dj.value("onset_threshold",
                                              cfg.detector.onset_threshold);
      cfg.detector.offset_threshold = dj.value("offset_threshold",
                                               cfg.detector.offset_threshold);
      cfg.detector.extra_latency_s = dj.value("extra_latency_s",
                                              cfg.detector.extra_latency_s);
      cfg.auto_calibrate = dj.value("auto_calibrate", cfg.auto_calibrate);
      cfg.calibration_duration_s = dj.value("calibration_duration_s",
                                            cfg.calibration_duration_s);
      cfg.calibration_safety = dj.value("calibration_safety",
                                        cfg.calibration_safety);
    }

    if (j.contains("estimation")) {
      const auto& ej = j.at("estimation");
      cfg.estimation.use_pzr = ej.value("use_pzr", cfg.estimation.use_pzr);
      cfg.estimation.rate_hz = ej.value("rate_hz", cfg.estimation.rate_hz);
      if (ej.contains("pad")) {
        const auto& pj = ej.at("pad");
        cfg.estimation.pad.pitch_m = pj.value("pitch_m",
                                              cfg.estimation.pad.pitch_m);
        cfg.estimation.pad.blob_sigma_taxels = pj.value(
            "blob_sigma_taxels", cfg.estimation.pad.blob_sigma_taxels);
        cfg.estimation.pad.gain = pj.value("gain", cfg.estimation.pad.gain);
        cfg.estimation.pad.noise_stddev =
            pj.value("noise_stddev", cfg.estimation.pad.noise_stddev);
        cfg.estimation.pad.contact_floor =
            pj.value("contact_floor", cfg.estimation.pad.contact_floor);
      }
    }

    if (j.contains("batch_ranges")) {
      const auto& rj = j.at("batch_ranges");
      BatchRanges ranges;
      ranges.traction_initial_n = json_to_range(rj, "traction_initial_N");
      ranges.traction_step_n = json_to_range(rj, "traction_step_N");
      ranges.grasp_initial_n = json_to_range(rj, "grasp_initial_N");
      ranges.grasp_target_n = json_to_range(rj, "grasp_target_N");
      ranges.grasp_ramp_s = json_to_range(rj, "grasp_ramp_s");
      ranges.grasp_reaction_delay_s =
          json_to_range(rj, "grasp_reaction_delay_s");
      cfg.batch_ranges = ranges;
    }

    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ScenarioInvalid(std::string("malformed scenario: ") + e.what());
  } catch (const Error& e) {
    throw ScenarioInvalid(std::string("invalid scenario: ") + e.what());
  }

  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioInvalid("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ScenarioInvalid(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;

  json contacts = json::array();
  for (const auto& c : cfg.contacts) {
    contacts.push_back({{"position_m", vec3_to_json(c.position)},
                        {"normal", vec3_to_json(c.normal)},
                        {"mu", c.mu},
                        {"finger_id", c.finger_id},
                        {"phalanx_id", c.phalanx_id}});
  }
  j["contacts"] = contacts;

  json chains = json::array();
  for (const auto& ch : cfg.chains) {
    json joints = json::array();
    for (const auto& joint : ch.joints) {
      joints.push_back({{"axis", vec3_to_json(joint.axis)},
                        {"origin_m", vec3_to_json(joint.origin)},
                        {"angle_rad", joint.angle},
                        {"tau_min_Nm", joint.tau_min},
                        {"tau_max_Nm", joint.tau_max}});
    }
    chains.push_back({{"finger_id", ch.finger_id},
                      {"link_lengths_m", ch.link_lengths},
                      {"joints", joints}});
  }
  j["chains"] = chains;

  j["object_frame"] = {{"origin_m", vec3_to_json(cfg.object_frame.origin)},
                       {"rotation", mat3_to_json(cfg.object_frame.rotation)}};
  j["pull_axis"] = vec3_to_json(cfg.pull_axis);

  json baseline = json::array();
  for (int i = 0; i < cfg.baseline_normals.size(); ++i) {
    baseline.push_back(cfg.baseline_normals[i]);
  }
  j["baseline_normals_N"] = baseline;

  j["sim"] = {{"object_mass_kg", cfg.object_mass_kg},
              {"mu_kinetic_ratio", cfg.mu_kinetic_ratio},
              {"v_eps_mps", cfg.v_eps_mps},
              {"dt_s", cfg.dt_s},
              {"duration_s", cfg.duration_s},
              {"slide_limit_m", cfg.slide_limit_m},
              {"trace_decimation", cfg.trace_decimation}};

  j["traction_profile"] = profile_to_json(cfg.traction_profile);
  if (!cfg.grasp_profile.empty()) {
    j["grasp_profile"] = profile_to_json(cfg.grasp_profile);
  }

  json control;
  control["policy"] =
      cfg.scripted ? "scripted"
                   : (cfg.policy == ReinforcePolicy::SingleStep
                          ? "single_step"
                          : "progressive");
  control["alpha"] = cfg.alpha;
  control["ramp_duration_s"] = cfg.ramp_duration_s;
  control["processing_latency_s"] = cfg.processing_latency_s;
  control["refractory_s"] = cfg.refractory_s;
  control["stabilize_hold_s"] = cfg.stabilize_hold_s;
  if (std::isfinite(cfg.staleness_bound_s)) {
    control["staleness_bound_s"] = cfg.staleness_bound_s;
  }
  j["control"] = control;

  j["qp_weights"] = {{"normal_sum", cfg.weights.normal_sum},
                     {"tangential", cfg.weights.tangential},
                     {"variance", cfg.weights.variance}};

  j["vibration"] = {
      {"sample_rate_Hz", cfg.vibration.sample_rate_hz},
      {"baseline_amplitude", cfg.vibration.baseline_amplitude},
      {"baseline_low_Hz", cfg.vibration.baseline_low_hz},
      {"baseline_high_Hz", cfg.vibration.baseline_high_hz},
      {"slip_gain", cfg.vibration.slip_gain},
      {"slip_band_low_Hz", cfg.vibration.slip_band_low_hz},
      {"slip_band_high_Hz", cfg.vibration.slip_band_high_hz},
      {"transient_gain", cfg.vibration.transient_gain},
      {"transient_cutoff_Hz", cfg.vibration.transient_cutoff_hz}};

  j["detector"] = {{"window_samples", cfg.detector.window_samples},
                   {"hop_samples", cfg.detector.hop_samples},
                   {"sample_rate_Hz", cfg.detector.sample_rate_hz},
                   {"band_low_Hz", cfg.detector.band_low_hz},
                   {"band_high_Hz", cfg.detector.band_high_hz},
                   {"onset_threshold", cfg.detector.onset_threshold},
                   {"offset_threshold", cfg.detector.offset_threshold},
                   {"extra_latency_s", cfg.detector.extra_latency_s},
                   {"auto_calibrate", cfg.auto_calibrate},
                   {"calibration_duration_s", cfg.calibration_duration_s},
                   {"calibration_safety", cfg.calibration_safety}};

  j["estimation"] = {
      {"use_pzr", cfg.estimation.use_pzr},
      {"rate_hz", cfg.estimation.rate_hz},
      {"pad",
       {{"pitch_m", cfg.estimation.pad.pitch_m},
        {"blob_sigma_taxels", cfg.estimation.pad.blob_sigma_taxels},
        {"gain", cfg.estimation.pad.gain},
        {"noise_stddev", cfg.estimation.pad.noise_stddev},
        {"contact_floor", cfg.estimation.pad.contact_floor}}}};

  if (cfg.batch_ranges) {
    json rj = json::object();
    range_to_json(&rj, "traction_initial_N", cfg.batch_ranges->traction_initial_n);
    range_to_json(&rj, "traction_step_N", cfg.batch_ranges->traction_step_n);
    range_to_json(&rj, "grasp_initial_N", cfg.batch_ranges->grasp_initial_n);
    range_to_json(&rj, "grasp_target_N", cfg.batch_ranges->grasp_target_n);
    range_to_json(&rj, "grasp_ramp_s", cfg.batch_ranges->grasp_ramp_s);
    range_to_json(&rj, "grasp_reaction_delay_s",
                  cfg.batch_ranges->grasp_reaction_delay_s);
    j["batch_ranges"] = rj;
  }

  j["seed"] = cfg.seed;
  return j;
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file: " + path);
  out << scenario_to_json(cfg).dump(2) << "\n";
  if (!out) throw Error("failed writing scenario file: " + path);
}

void validate_scenario(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ScenarioInvalid(msg); };

  if (cfg.contacts.empty()) fail("scenario has no contacts");
  std::set<int> chain_ids;
  for (const auto& ch : cfg.chains) {
    if (!chain_ids.insert(ch.finger_id).second) {
      fail("duplicate chain finger_id " + std::to_string(ch.finger_id));
    }
    try {
      ch.validate();
    } catch (const Error& e) {
      fail(std::string("chain ") + std::to_string(ch.finger_id) + ": " +
           e.what());
    }
  }
  for (std::size_t i = 0; i < cfg.contacts.size(); ++i) {
    const Contact& c = cfg.contacts[i];
    try {
      c.validate();
    } catch (const Error& e) {
      fail(std::string("contact on finger ") + std::to_string(c.finger_id) +
           ": " + e.what());
    }
    if (chain_ids.count(c.finger_id) == 0) {
      fail("contact references unknown finger_id " +
           std::to_string(c.finger_id));
    }
    // baseline_normals_N is positional; keep file order equal to the model's
    // canonical (finger_id, phalanx_id) order so indices cannot silently
    // permute.
    if (i > 0) {
      const Contact& prev = cfg.contacts[i - 1];
      if (std::make_pair(prev.finger_id, prev.phalanx_id) >
          std::make_pair(c.finger_id, c.phalanx_id)) {
        fail("contacts must be sorted by (finger_id, phalanx_id)");
      }
    }
  }

  if (cfg.baseline_normals.size() !=
      static_cast<Eigen::Index>(cfg.contacts.size())) {
    fail("baseline_normals_N length must equal the contact count");
  }
  for (int i = 0; i < cfg.baseline_normals.size(); ++i) {
    if (!(cfg.baseline_normals[i] >= 0.0) ||
        !std::isfinite(cfg.baseline_normals[i])) {
      fail("baseline normal forces must be finite and nonnegative");
    }
  }

  auto check_profile = [&](const std::vector<TractionKnot>& p,
                           const char* name) {
    if (p.empty()) fail(std::string(name) + " is empty");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i].force_n >= 0.0)) {
        fail(std::string(name) + " has a negative force");
      }
      if (i > 0 && p[i].t_s < p[i - 1].t_s) {
        fail(std::string(name) + " knots are not time-sorted");
      }
    }
  };
  check_profile(cfg.traction_profile, "traction_profile");
  if (cfg.scripted) check_profile(cfg.grasp_profile, "grasp_profile");

  if (!(cfg.dt_s > 0.0)) fail("dt_s must be positive");
  // Sensing and dynamics share one clock: one vibration sample per step.
  if (std::abs(cfg.dt_s * cfg.vibration.sample_rate_hz - 1.0) > 1e-9) {
    fail("dt_s must equal the vibration sample period");
  }
  if (cfg.detector.sample_rate_hz != cfg.vibration.sample_rate_hz) {
    fail("detector and vibration sample rates must match");
  }
  if (!(cfg.duration_s > 0.0)) fail("duration_s must be positive");
  if (!(cfg.object_mass_kg > 0.0)) fail("object_mass_kg must be positive");
  if (!(cfg.mu_kinetic_ratio > 0.0 && cfg.mu_kinetic_ratio <= 1.0)) {
    fail("mu_kinetic_ratio must lie in (0, 1]");
  }
  if (!(cfg.v_eps_mps > 0.0)) fail("v_eps_mps must be positive");
  if (!(cfg.slide_limit_m > 0.0)) fail("slide_limit_m must be positive");
  if (cfg.trace_decimation < 1) fail("trace_decimation must be >= 1");
  if (!(cfg.alpha >= 0.0)) fail("alpha must be nonnegative");
  if (!(cfg.ramp_duration_s >= 0.0)) fail("ramp_duration_s must be >= 0");
  if (!(cfg.processing_latency_s >= 0.0)) {
    fail("processing_latency_s must be >= 0");
  }
  if (!(cfg.refractory_s >= 0.0)) fail("refractory_s must be >= 0");
  if (!(cfg.stabilize_hold_s >= 0.0)) fail("stabilize_hold_s must be >= 0");

  if (cfg.detector.window_samples <= 0 || cfg.detector.hop_samples <= 0 ||
      cfg.detector.hop_samples > cfg.detector.window_samples) {
    fail("detector window/hop sizes must satisfy 0 < hop <= window");
  }
  if (!cfg.auto_calibrate &&
      !(cfg.detector.onset_threshold > cfg.detector.offset_threshold &&
        cfg.detector.offset_threshold >= 0.0)) {
    fail("detector thresholds must satisfy onset > offset >= 0");
  }
  if (!(cfg.estimation.rate_hz > 0.0)) fail("estimation rate must be > 0");
}

}  // namespace slipstop
