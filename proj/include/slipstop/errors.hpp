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

#ifndef SLIPSTOP_ERRORS_HPP
#define SLIPSTOP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slipstop {

// Base class for all library errors. Each concrete type corresponds to a
// named failure mode of one operation; callers that need to branch catch
// the concrete type, the CLI catches Error and maps to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonUnitNormal : Error {
  using Error::Error;
};
struct EmptyContactSet : Error {
  using Error::Error;
};
struct UnknownFinger : Error {
  using Error::Error;
};
struct UnknownPhalanx : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct DegenerateInput : Error {
  using Error::Error;
};
struct TrivialNullspace : Error {
  using Error::Error;
};
struct TorqueBoxExcludesZero : Error {
  using Error::Error;
};
struct StaleModel : Error {
  using Error::Error;
};
struct ContactOffPad : Error {
  using Error::Error;
};
struct NonFiniteState : Error {
  using Error::Error;
};
struct UnknownDecomposition : Error {
  using Error::Error;
};
struct ScenarioInvalid : Error {
  using Error::Error;
};

}  // namespace slipstop

#endif  // SLIPSTOP_ERRORS_HPP
