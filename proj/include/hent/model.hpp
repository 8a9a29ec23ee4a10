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

#include <optional>
#include <string>
#include <string_view>

namespace hent {

namespace constants {
inline constexpr double planck = 6.62607015e-34;       // J s
inline constexpr double speed_of_light = 299792458.0;  // m / s
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

/// Physical rates of one transducer node.
///
/// All rates are plain s^-1 values. The heralding optical mode (signal) and
/// the pump mode carry separate extrinsic/intrinsic couplings; by default
/// they are equal, and the strongly over-coupled heralding variant is
/// expressed by raising gamma_e_sig alone.
struct TransducerParams {
  double g0 = 1.0e3;
  double gamma_e_sig = 1.0e8;
  double gamma_i_sig = 1.0e8;
  double gamma_e_pump = 1.0e8;
  double gamma_i_pump = 1.0e8;
  double gamma_mw = 1.0e3;
  double lambda_pump = 1500.0e-9;
  double t_reset = 1.0e-6;
  double detector_efficiency = 1.0;
  double dark_count_rate = 0.0;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;

  /// Total loss of the heralding mode.
  double gamma_sig() const { return gamma_e_sig + gamma_i_sig; }

  /// Probability that a photon leaving the heralding mode produces a click.
  double herald_efficiency() const;

  /// Heralding mode strongly coupled to the waveguide (gamma_e_sig =
  /// ratio * gamma_i_sig) with the pump mode left as is. No microwave reset
  /// is needed in this regime, so t_reset is zeroed.
  TransducerParams strong_coupling(double extrinsic_ratio) const;

  friend bool operator==(const TransducerParams&, const TransducerParams&) = default;
};

enum class Detuning { Blue, Red };
enum class Storage { Immediate, OnDemandWorstCase };

std::string_view to_string(Detuning d);
std::string_view to_string(Storage s);
Detuning parse_detuning(std::string_view text);
Storage parse_storage(std::string_view text);

struct ProtocolConfig {
  Detuning detuning = Detuning::Red;
  double pump_power = 0.0;
  /// Empty means "optimize the pulse duration".
  std::optional<double> pulse_duration;
  bool purification = false;
  double gate_fidelity = 0.999;
  Storage storage = Storage::Immediate;
  int channels = 1;

  void validate() const;

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

/// Photon energy h c / lambda in joules.
double photon_energy(double lambda);

/// Mean intracavity pump photon number for input power `power` (W), using
/// the pump-mode couplings.
double pump_photon_number(const TransducerParams& p, double power);

/// g = g0 sqrt(n_p).
double effective_coupling(double g0, double n_p);

/// Pump power dissipated inside the cryostat by the intrinsic loss of the
/// pump resonance: P * 4 ge gi / (ge + gi)^2.
double heating_power(const TransducerParams& p, double power);

}  // namespace hent
