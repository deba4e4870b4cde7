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

#ifndef SLIPSTOP_SLIP_CUE_HPP_
#define SLIPSTOP_SLIP_CUE_HPP_

#include <vector>

namespace slipstop {

// One slip/no-slip verdict from the vibration detector. Timestamps are
// simulated seconds and monotone within a trial.
struct SlipCue {
  bool detected = false;
  double confidence = 0.0;  // normalized margin over threshold, in [0, 1]
  double timestamp = 0.0;
  std::vector<int> finger_ids;
};

}  // namespace slipstop

#endif  // SLIPSTOP_SLIP_CUE_HPP_
