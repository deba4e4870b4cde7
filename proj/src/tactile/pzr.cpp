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

#include "slipstop/tactile/pzr.hpp"

#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

PzRFrame render_pzr(const Contact& contact, const Eigen::Vector3d& force,
                    const PadGeometry& pad, Rng* rng, double timestamp) {
  if (!(force[0] >= 0.0)) {
    throw DegenerateInput("normal force must be nonnegative");
  }
  PzRFrame frame;
  frame.pad_id = contact.phalanx_id;
  frame.timestamp = timestamp;
  frame.pitch_m = pad.pitch_m;

  const Eigen::Vector3d local = pad.frame.to_local(contact.position);
  const double cx = local.x() / pad.pitch_m;  // taxel units, column axis
  const double cy = local.y() / pad.pitch_m;  // row axis
  const bool on_pad = cx >= -0.5 && cx <= PadGeometry::kCols - 0.5 &&
                      cy >= -0.5 && cy <= PadGeometry::kRows - 0.5;
  if (!on_pad) {
    frame.off_pad = true;
    return frame;
  }

  if (force[0] > 0.0) {
    const double inv_two_sigma2 =
        1.0 / (2.0 * pad.blob_sigma_taxels * pad.blob_sigma_taxels);
    double mass = 0.0;
    for (int r = 0; r < PadGeometry::kRows; ++r) {
      for (int c = 0; c < PadGeometry::kCols; ++c) {
        const double d2 = (c - cx) * (c - cx) + (r - cy) * (r - cy);
        frame.pressures(r, c) = std::exp(-d2 * inv_two_sigma2);
        mass += frame.pressures(r, c);
      }
    }
    // Grid-sum normalization keeps total pressure exactly gain * f_n, so
    // the response is linear in normal force with no truncation residue.
    frame.pressures *= pad.gain * force[0] / mass;
  }

  if (rng != nullptr && pad.noise_stddev > 0.0) {
    for (int r = 0; r < PadGeometry::kRows; ++r) {
      for (int c = 0; c < PadGeometry::kCols; ++c) {
        frame.pressures(r, c) = std::max(
            0.0, frame.pressures(r, c) + rng->gaussian(0.0,
                                                       pad.noise_stddev));
      }
    }
  }
  return frame;
}

std::optional<std::pair<Eigen::Vector3d, Eigen::Vector3d>> estimate_contact(
    const PzRFrame& frame, const PadGeometry& pad) {
  const double total = frame.pressures.sum();
  if (frame.off_pad || total < pad.contact_floor) return std::nullopt;

  double cx = 0.0, cy = 0.0;
  for (int r = 0; r < PadGeometry::kRows; ++r) {
    for (int c = 0; c < PadGeometry::kCols; ++c) {
      cx += frame.pressures(r, c) * c;
      cy += frame.pressures(r, c) * r;
    }
  }
  cx /= total;
  cy /= total;

  const Eigen::Vector3d local(cx * pad.pitch_m, cy * pad.pitch_m, 0.0);
  const Eigen::Vector3d position =
      pad.frame.rotation * local + pad.frame.origin;
  const Eigen::Vector3d normal = pad.frame.rotation.col(2);
  return std::make_pair(position, normal);
}

}  // namespace slipstop
