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

#ifndef SLIPSTOP_TACTILE_PZR_HPP_
#define SLIPSTOP_TACTILE_PZR_HPP_

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "slipstop/contact.hpp"
#include "slipstop/geometry.hpp"
#include "slipstop/rng.hpp"

namespace slipstop {

// A rigid planar 8x8 pressure pad. Taxel (row, col) sits at pad-local
// (col * pitch, row * pitch, 0); the sensing surface normal is local +z.
struct PadGeometry {
  static constexpr int kRows = 8;
  static constexpr int kCols = 8;
  Pose frame;                      // pad-local to world
  double pitch_m = 0.002;          // taxel spacing
  double blob_sigma_taxels = 1.0;  // pressure blob spread
  double gain = 1.0;               // total pressure per newton of normal force
  double noise_stddev = 0.002;     // additive taxel noise, pressure units
  double contact_floor = 1e-6;     // total pressure below this reads NoContact
};

struct PzRFrame {
  Eigen::Matrix<double, 8, 8> pressures =
      Eigen::Matrix<double, 8, 8>::Zero();
  int pad_id = 0;
  double timestamp = 0.0;
  double pitch_m = 0.002;
  // Projected contact center fell outside the taxel grid; pressures hold
  // the (noise-free) zero response.
  bool off_pad = false;
};

// Forward model of the pressure array: a Gaussian blob centered at the
// contact's pad-frame position whose total mass is gain * f_n exactly, plus
// optional additive noise from `rng`. `force` is the contact-frame triple
// [f_n, f_t1, f_t2]; only the normal component loads the pad.
PzRFrame render_pzr(const Contact& contact, const Eigen::Vector3d& force,
                    const PadGeometry& pad, Rng* rng = nullptr,
                    double timestamp = 0.0);

// Pressure-weighted centroid mapped back to the pad surface. Returns the
// world-frame (position, surface normal) pair, or nothing when total
// pressure sits below the contact floor.
std::optional<std::pair<Eigen::Vector3d, Eigen::Vector3d>> estimate_contact(
    const PzRFrame& frame, const PadGeometry& pad);

}  // namespace slipstop

#endif  // SLIPSTOP_TACTILE_PZR_HPP_
