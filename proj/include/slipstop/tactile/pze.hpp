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

#ifndef SLIPSTOP_TACTILE_PZE_HPP_
#define SLIPSTOP_TACTILE_PZE_HPP_

#include <cstdint>
#include <vector>

#include "slipstop/rng.hpp"

namespace slipstop {

// One high-rate vibration sample. Spacing is exactly 1/sample_rate in
// simulated time.
struct PzESample {
  double value = 0.0;
  double timestamp = 0.0;
};

struct VibrationConfig {
  double sample_rate_hz = 10000.0;
  // Always-on band-limited floor standing in for arm and ambient
  // vibrations, shaped to the sensor's effective bandwidth.
  double baseline_amplitude = 0.01;
  double baseline_low_hz = 30.0;
  double baseline_high_hz = 2500.0;
  // Frictional texture added while the object slides. In-band energy grows
  // monotonically with slip speed (amplitude ~ sqrt(speed)). The default
  // puts onset detection in the tens-of-milliseconds range at mm/s speeds
  // with the stock detector window.
  double slip_gain = 0.3;
  double slip_band_low_hz = 400.0;
  double slip_band_high_hz = 1800.0;
  // Low-frequency term excited by grasp-force transients.
  double transient_gain = 2e-4;
  double transient_cutoff_hz = 15.0;
};

// RBJ-cookbook biquad, transposed direct form II.
class Biquad {
 public:
  static Biquad bandpass(double fs, double f0, double q);
  static Biquad lowpass(double fs, double f0, double q);
  double process(double x);

 private:
  Biquad(double b0, double b1, double b2, double a1, double a2);
  double b0_, b1_, b2_, a1_, a2_;
  double s1_ = 0.0, s2_ = 0.0;
};

// Streaming vibration synthesizer driven one sample at a time so the bench
// can feed it the instantaneous slip speed and grasp force of each step.
// Deterministic per seed; the same random draws happen regardless of the
// input trajectory, so runs with different speeds share noise realizations.
class VibrationSynth {
 public:
  VibrationSynth(const VibrationConfig& cfg, std::uint64_t seed);

  // Advances one sample period and returns the sample at its end.
  PzESample step(double slip_speed_mps, double grasp_force_n);

  double sample_period_s() const { return 1.0 / cfg_.sample_rate_hz; }

 private:
  VibrationConfig cfg_;
  Rng rng_;
  Biquad baseline_bp_;
  Biquad slip_bp_;
  std::int64_t n_ = 0;
  double prev_force_n_ = 0.0;
  bool have_prev_force_ = false;
  double transient_state_ = 0.0;
  double transient_alpha_ = 0.0;
};

// Renders a constant-condition stream of the given duration.
std::vector<PzESample> render_pze(double slip_speed_mps, double grasp_force_n,
                                  double duration_s, std::uint64_t seed,
                                  const VibrationConfig& cfg = {});

}  // namespace slipstop

#endif  // SLIPSTOP_TACTILE_PZE_HPP_
