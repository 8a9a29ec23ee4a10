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

#include "hent/analytic.hpp"
#include "hent/calibration.hpp"
#include "hent/rng.hpp"
#include "hent/scenario.hpp"

#include <optional>
#include <vector>

namespace hent {

/// Empirical columns from the trajectory engine, after the same storage and
/// purification budget as the analytic columns.
struct TrajectoryColumns {
  double fidelity = 0;
  double fidelity_se = 0;
  double rate = 0;
  double rate_se = 0;
  std::size_t heralds = 0;
};

struct VariantPoint {
  VariantOption option;
  OperatingPoint op;
  std::optional<TrajectoryColumns> trajectory;
};

struct RateFidelityPoint {
  std::size_t index = 0;
  double axis_value = 0;
  double pump_power = 0;
  double n_p = 0;
  double g = 0;
  double coupling_ratio = 0;
  double r0 = 0;
  double delta_t = 0;
  double r_e = 0;
  double heating = 0;
  int channels = 1;
  bool validity_violation = false;
  /// False on a target-rate axis when the requested rate exceeds the
  /// saturated maximum; the point then sits at the rate maximum.
  bool target_reached = true;
  std::vector<VariantPoint> variants;
};

/// Independent channels: rates and heating scale with `channels`, fidelities
/// do not. Throws std::invalid_argument for channels < 1.
RateFidelityPoint multiplexed_rate(const RateFidelityPoint& point, int channels);

struct PowerForRate {
  double pump_power = 0;
  bool reached = false;
};

/// Smallest pump power whose optimized raw pair rate equals `target`.
PowerForRate pump_power_for_rate(const TransducerParams& left, const TransducerParams& right,
                                 const ProtocolConfig& protocol, double target);

/// One row per sweep coordinate, variants in scenario order, multiplexed over
/// scenario channels. Output is identical for any worker count.
std::vector<RateFidelityPoint> run_sweep(const Scenario& s, Execution exec = Execution::Parallel);
std::vector<RateFidelityPoint> run_sweep(const Scenario& s, const CalibrationRecord& cal,
                                         Execution exec = Execution::Parallel);

}  // namespace hent
