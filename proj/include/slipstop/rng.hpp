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

#ifndef SLIPSTOP_RNG_HPP
#define SLIPSTOP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace slipstop {

// Seeded random source with reproducible output. mt19937_64 is fully
// specified by the standard; the uniform/gaussian transforms below are
// written out explicitly because the std::*_distribution algorithms are
// implementation-defined and would break trace determinism across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one value per call, the pair partner is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  std::uint64_t next_u64() { return engine_(); }

  // Derives an independent stream, e.g. one per trial in a batch.
  Rng fork(std::uint64_t stream_id) {
    return Rng(engine_() ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace slipstop

#endif  // SLIPSTOP_RNG_HPP
