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

#include "slipstop/tactile/detector.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "slipstop/errors.hpp"

namespace slipstop {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

BandEnergyDetector::BandEnergyDetector(const DetectorConfig& cfg)
    : cfg_(cfg) {
  if (cfg_.window_samples <= 0 || cfg_.hop_samples <= 0 ||
      cfg_.hop_samples > cfg_.window_samples) {
    throw DegenerateInput("window/hop sizes must satisfy 0 < hop <= window");
  }
  if (!(cfg_.onset_threshold > cfg_.offset_threshold &&
        cfg_.offset_threshold >= 0.0)) {
    throw DegenerateInput("hysteresis requires onset > offset >= 0");
  }
  const int n = cfg_.window_samples;
  ring_.assign(n, 0.0);
  hann_.resize(n);
  for (int i = 0; i < n; ++i) {
    hann_[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / (n - 1)));
  }
  const double bin_width = cfg_.sample_rate_hz / n;
  band_bin_low_ = std::max(
      0, static_cast<int>(std::ceil(cfg_.band_low_hz / bin_width)));
  band_bin_high_ = std::min(
      n / 2, static_cast<int>(std::floor(cfg_.band_high_hz / bin_width)));
  if (band_bin_low_ > band_bin_high_) {
    throw DegenerateInput("energy band selects no FFT bins");
  }
  fft_in_ = fftw_alloc_real(n);
  fft_out_ = fftw_alloc_complex(n / 2 + 1);
  fft_plan_ = fftw_plan_dft_r2c_1d(
      n, fft_in_, static_cast<fftw_complex*>(fft_out_), FFTW_ESTIMATE);
}

BandEnergyDetector::~BandEnergyDetector() {
  if (fft_plan_ != nullptr) {
    fftw_destroy_plan(static_cast<fftw_plan>(fft_plan_));
  }
  if (fft_out_ != nullptr) fftw_free(fft_out_);
  if (fft_in_ != nullptr) fftw_free(fft_in_);
}

double BandEnergyDetector::window_energy() const {
  const int n = cfg_.window_samples;
  for (int i = 0; i < n; ++i) {
    fft_in_[i] = ring_[(count_ - n + i) % n] * hann_[i];
  }
  fftw_execute(static_cast<fftw_plan>(fft_plan_));
  const auto* out = static_cast<const fftw_complex*>(fft_out_);
  double energy = 0.0;
  for (int k = band_bin_low_; k <= band_bin_high_; ++k) {
    energy += out[k][0] * out[k][0] + out[k][1] * out[k][1];
  }
  return energy / (static_cast<double>(n) * n);
}

std::optional<SlipCue> BandEnergyDetector::push(const PzESample& sample) {
  ring_[count_ % cfg_.window_samples] = sample.value;
  ++count_;
  // Warmup: no verdicts until the first full window.
  if (count_ < cfg_.window_samples) return std::nullopt;
  if ((count_ - cfg_.window_samples) % cfg_.hop_samples != 0) {
    return std::nullopt;
  }

  const double energy = window_energy();
  last_energy_ = energy;
  if (!slipping_ && energy > cfg_.onset_threshold) {
    slipping_ = true;
  } else if (slipping_ && energy < cfg_.offset_threshold) {
    slipping_ = false;
  }

  SlipCue cue;
  cue.detected = slipping_;
  cue.timestamp = sample.timestamp + cfg_.extra_latency_s;
  const double thr =
      slipping_ ? cfg_.onset_threshold : cfg_.offset_threshold;
  const double margin = slipping_ ? energy - thr : thr - energy;
  cue.confidence = std::clamp(margin / thr, 0.0, 1.0);
  return cue;
}

std::vector<SlipCue> detect_slip(const std::vector<PzESample>& stream,
                                 const DetectorConfig& cfg) {
  BandEnergyDetector det(cfg);
  std::vector<SlipCue> cues;
  for (const auto& s : stream) {
    if (auto cue = det.push(s)) cues.push_back(*cue);
  }
  return cues;
}

double calibrate_onset_threshold(const VibrationConfig& synth_cfg,
                                 const DetectorConfig& det_cfg,
                                 double duration_s, std::uint64_t seed,
                                 double safety_factor) {
  DetectorConfig probe = det_cfg;
  probe.onset_threshold = std::numeric_limits<double>::max();
  probe.offset_threshold = 0.0;
  BandEnergyDetector det(probe);
  // Constant grasp force: the calibration stream must contain baseline
  // vibrations only.
  VibrationSynth synth(synth_cfg, seed);
  const auto count = static_cast<std::int64_t>(
      std::llround(duration_s * synth_cfg.sample_rate_hz));
  double peak = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    if (det.push(synth.step(0.0, 5.0))) {
      peak = std::max(peak, det.last_energy());
    }
  }
  return peak * safety_factor;
}

}  // namespace slipstop
