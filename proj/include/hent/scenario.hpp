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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hent {

enum class Engine { Analytic, Trajectory, Both };
enum class SweepAxis { PumpPower, TargetRate };

std::string_view to_string(Engine e);
std::string_view to_string(SweepAxis a);
Engine parse_engine(std::string_view text);
SweepAxis parse_axis(std::string_view text);

/// One protocol option, written "red", "red+purify", "blue+storage", ...
/// "storage" selects on-demand worst-case storage.
struct VariantOption {
  Detuning detuning = Detuning::Red;
  bool purification = false;
  Storage storage = Storage::Immediate;

  std::string name() const;
  static VariantOption parse(std::string_view text);
  friend bool operator==(const VariantOption&, const VariantOption&) = default;
};

std::vector<VariantOption> default_variants();

/// Sweep description. Text form (all keys optional):
///
///     [protocol]
///     gate_fidelity = 0.999
///     pulse_duration = auto
///     channels = 1
///     variants = blue, red, red+purify, red+storage, red+purify+storage
///     [node]            # both nodes; [node.left] / [node.right] override
///     g0 = 1000
///     [sweep]
///     axis = pump_power # or target_rate (s^-1 of raw heralded pairs)
///     min = 1e-9
///     max = 1e-2
///     points = 64
///     [run]
///     engine = analytic # trajectory | both
///     trials = 2000
///     seed = 1
///     output = sweep.csv
///     calibration =     # empty: built-in record
struct Scenario {
  TransducerParams left;
  TransducerParams right;
  /// detuning, pump_power, purification and storage are set per variant and
  /// sweep point; the remaining fields apply to all of them.
  ProtocolConfig protocol;
  std::vector<VariantOption> variants = default_variants();

  SweepAxis axis = SweepAxis::PumpPower;
  double sweep_min = 1e-9;
  double sweep_max = 1e-2;
  int points = 64;

  Engine engine = Engine::Analytic;
  std::int64_t trials = 2000;
  std::uint64_t seed = 1;
  std::string output;
  std::string calibration;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Log-spaced sweep coordinates; all equal when min == max.
  std::vector<double> axis_values() const;

  std::string serialize() const;
  /// Throws std::invalid_argument prefixed with the line number.
  static Scenario parse(std::string_view text);
  static Scenario load(const std::string& path);

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace hent
