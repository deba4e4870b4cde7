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

#include "slipstop/tactile/pze.hpp"

#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Center frequency and Q spanning [lo, hi] with a single section.
void band_params(double lo, double hi, double* f0, double* q) {
  *f0 = std::sqrt(lo * hi);
  *q = *f0 / (hi - lo);
}
}  // namespace

Biquad::Biquad(double b0, double b1, double b2, double a1, double a2)
    : b0_(b0), b1_(b1), b2_(b2), a1_(a1), a2_(a2) {}

Biquad Biquad::bandpass(double fs, double f0, double q) {
  const double w0 = 2.0 * kPi * f0 / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  return Biquad(alpha / a0, 0.0, -alpha / a0, -2.0 * std::cos(w0) / a0,
                (1.0 - alpha) / a0);
}

Biquad Biquad::lowpass(double fs, double f0, double q) {
  const double w0 = 2.0 * kPi * f0 / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  return Biquad((1.0 - c) / (2.0 * a0), (1.0 - c) / a0, (1.0 - c) / (2.0 * a0),
                -2.0 * c / a0, (1.0 - alpha) / a0);
}

double Biquad::process(double x) {
  const double y = b0_ * x + s1_;
  s1_ = b1_ * x - a1_ * y + s2_;
  s2_ = b2_ * x - a2_ * y;
  return y;
}

VibrationSynth::VibrationSynth(const VibrationConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      rng_(seed),
      baseline_bp_([&] {
        double f0, q;
        band_params(cfg.baseline_low_hz, cfg.baseline_high_hz, &f0, &q);
        return Biquad::bandpass(cfg.sample_rate_hz, f0, q);
      }()),
      slip_bp_([&] {
        double f0, q;
        band_params(cfg.slip_band_low_hz, cfg.slip_band_high_hz, &f0, &q);
        return Biquad::bandpass(cfg.sample_rate_hz, f0, q);
      }()) {
  const double fc = cfg_.transient_cutoff_hz;
  transient_alpha_ = 1.0 - std::exp(-2.0 * kPi * fc / cfg_.sample_rate_hz);
}

PzESample VibrationSynth::step(double slip_speed_mps, double grasp_force_n) {
  if (!(slip_speed_mps >= 0.0)) {
    throw DegenerateInput("slip speed must be nonnegative");
  }
  // Both white sources are drawn every sample so the stream of draws does
  // not depend on the speed/force trajectory.
  const double white_baseline = rng_.gaussian();
  const double white_slip = rng_.gaussian();

  const double baseline =
      cfg_.baseline_amplitude * baseline_bp_.process(white_baseline);
  const double texture_amp = cfg_.slip_gain * std::sqrt(slip_speed_mps);
  const double texture = slip_bp_.process(texture_amp * white_slip);

  if (!have_prev_force_) {
    prev_force_n_ = grasp_force_n;
    have_prev_force_ = true;
  }
  const double force_rate =
      (grasp_force_n - prev_force_n_) * cfg_.sample_rate_hz;
  prev_force_n_ = grasp_force_n;
  transient_state_ += transient_alpha_ * (force_rate - transient_state_);

  ++n_;
  PzESample s;
  s.value = baseline + texture + cfg_.transient_gain * transient_state_;
  s.timestamp = static_cast<double>(n_) / cfg_.sample_rate_hz;
  return s;
}

std::vector<PzESample> render_pze(double slip_speed_mps, double grasp_force_n,
                                  double duration_s, std::uint64_t seed,
                                  const VibrationConfig& cfg) {
  VibrationSynth synth(cfg, seed);
  const auto count =
      static_cast<std::size_t>(std::llround(duration_s * cfg.sample_rate_hz));
  std::vector<PzESample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(synth.step(slip_speed_mps, grasp_force_n));
  }
  return out;
}

}  // namespace slipstop
