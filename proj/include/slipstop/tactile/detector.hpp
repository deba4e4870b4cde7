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

#ifndef SLIPSTOP_TACTILE_DETECTOR_HPP_
#define SLIPSTOP_TACTILE_DETECTOR_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "slipstop/slip_cue.hpp"
#include "slipstop/tactile/pze.hpp"

namespace slipstop {

struct DetectorConfig {
  int window_samples = 256;  // 25.6 ms at 10 kHz
  int hop_samples = 64;      // 1/4 window
  double sample_rate_hz = 10000.0;
  double band_low_hz = 400.0;
  double band_high_hz = 1800.0;
  // Hysteresis pair: slip state latches above onset, releases below offset.
  double onset_threshold = 1.0;
  double offset_threshold = 0.5;
  // Models recording/transmission delays downstream of the window itself.
  double extra_latency_s = 0.0;
};

// Sliding-window spectral band energy with hysteresis thresholding. One
// cue per hop once the first window has filled; cue timestamps are the
// window-end sample time plus the configured extra latency. Slip onsets
// and releases strictly alternate by construction of the hysteresis.
class BandEnergyDetector {
 public:
  explicit BandEnergyDetector(const DetectorConfig& cfg);
  ~BandEnergyDetector();
  BandEnergyDetector(const BandEnergyDetector&) = delete;
  BandEnergyDetector& operator=(const BandEnergyDetector&) = delete;

  // Feeds one sample. Returns a cue when a hop boundary completes, nothing
  // while the window is still warming up or between hops.
  std::optional<SlipCue> push(const PzESample& sample);

  bool slipping() const { return slipping_; }
  double last_energy() const { return last_energy_; }
  const DetectorConfig& config() const { return cfg_; }

 private:
  double window_energy() const;

  DetectorConfig cfg_;
  std::vector<double> ring_;
  std::vector<double> hann_;
  std::int64_t count_ = 0;
  bool slipping_ = false;
  double last_energy_ = 0.0;
  int band_bin_low_ = 0;
  int band_bin_high_ = 0;
  double* fft_in_ = nullptr;
  void* fft_out_ = nullptr;   // fftw_complex array
  void* fft_plan_ = nullptr;  // fftw_plan
};

// Offline convenience wrapper: runs the detector over a whole stream.
std::vector<SlipCue> detect_slip(const std::vector<PzESample>& stream,
                                 const DetectorConfig& cfg);

// Calibrates the onset threshold from a baseline-only rendering: the
// maximum window energy observed over `duration_s`, scaled by
// `safety_factor`. The offset threshold is conventionally half the onset.
double calibrate_onset_threshold(const VibrationConfig& synth_cfg,
                                 const DetectorConfig& det_cfg,
                                 double duration_s, std::uint64_t seed,
                                 double safety_factor = 1.5);

}  // namespace slipstop

#endif  // SLIPSTOP_TACTILE_DETECTOR_HPP_
