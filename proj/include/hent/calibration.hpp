// Copyright 2026 The hent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "hent/model.hpp"

#include <string>
#include <string_view>

namespace hent {

/// Heralded-pair infidelity law eps = prefactor * (g / gamma)^exponent,
/// fitted against the trajectory simulation. `residual` is the RMS of the
/// natural-log residuals of the fit.
struct VariantCalibration {
  double prefactor = 0;
  double exponent = 0;
  double residual = 0;

  double infidelity(double coupling_ratio) const;

  friend bool operator==(const VariantCalibration&, const VariantCalibration&) = default;
};

/// Immutable per-variant calibration. Serialized as `key = value` lines:
///
///     blue.prefactor = 12.1
///     blue.exponent = 2.0
///     blue.residual = 0.004
///     red.prefactor = ...
struct CalibrationRecord {
  VariantCalibration blue;
  VariantCalibration red;

  const VariantCalibration& for_variant(Detuning d) const {
    return d == Detuning::Blue ? blue : red;
  }

  /// Values measured with `hent calibrate` and frozen into the library.
  static const CalibrationRecord& builtin();

  std::string serialize() const;
  /// Throws std::invalid_argument with a line number on malformed input.
  static CalibrationRecord parse(std::string_view text);
  static CalibrationRecord load(const std::string& path);
  void save(const std::string& path) const;

  friend bool operator==(const CalibrationRecord&, const CalibrationRecord&) = default;
};

}  // namespace hent
