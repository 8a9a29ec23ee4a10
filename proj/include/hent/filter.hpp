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

#include "hent/rng.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hent {

/// One add/drop ring. Rates are angular (s^-1); the resonance offset from
/// the pump is in Hz.
struct RingStage {
  double kappa_i = 0;
  double kappa_e = 0;
  double f0_offset = 0;

  void validate() const;
};

/// Through-port amplitude 1 - ke / (i 2 pi d + (ki + 2 ke) / 2), d = detuning - f0_offset.
std::complex<double> stage_through_response(const RingStage& stage, double detuning);
/// Drop-port amplitude ke / (i 2 pi d + (ki + 2 ke) / 2).
std::complex<double> stage_drop_response(const RingStage& stage, double detuning);
/// Product of the through responses of all stages.
std::complex<double> cascade_response(std::span<const RingStage> stages, double detuning);

/// 10 log10 |t|^2.
double power_db(std::complex<double> amplitude);

struct FilterSpec {
  int n_stages = 5;
  double kappa_i = 2 * 3.141592653589793 * 70.0;
  double kappa_e_mean = 2 * 3.141592653589793 * 1e9;
  double kappa_e_std = 2 * 3.141592653589793 * 1e8;
  double f0_std = 50e6;
  double stop_bandwidth = 200e6;
  double signal_offset = 7e9;
  double extinction_target_db = -95.0;
  double insertion_loss_target_db = -0.5;

  void validate() const;
  std::vector<RingStage> nominal() const;
};

/// Highest cascade transmission (dB) over |detuning| <= stop_bandwidth / 2.
double worst_stopband_db(std::span<const RingStage> stages, double stop_bandwidth);

struct FilterDraw {
  std::size_t index = 0;
  double worst_extinction_db = 0;
  double insertion_loss_db = 0;
  bool pass = false;
};

struct FilterStatistics {
  std::vector<FilterDraw> draws;
  double pass_fraction = 0;
  double mean_worst_extinction_db = 0;
  double mean_insertion_loss_db = 0;

  /// Columns: draw, worst_extinction_db, insertion_loss_db, pass.
  void write_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;
};

/// Per stage: kappa_e ~ Normal(mean, std) truncated to positive values and
/// f0_offset ~ Normal(0, f0_std). Draw i uses its own stream, and the normal
/// variates are scaled rather than redrawn, so specs differing only in
/// spreads see common random numbers.
std::vector<RingStage> sample_stages(const FilterSpec& spec, std::uint64_t seed, std::size_t draw);

FilterStatistics tolerance_monte_carlo(const FilterSpec& spec, std::size_t draws,
                                       std::uint64_t seed, Execution exec = Execution::Parallel);

}  // namespace hent
