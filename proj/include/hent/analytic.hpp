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

#include "hent/calibration.hpp"
#include "hent/model.hpp"

#include <complex>

namespace hent {

/// Amplitudes of c0|ground> + c1|excited> inside the two-level subspace
/// driven at coupling g and drained at gamma_e. For the blue protocol the
/// basis is {|00>, |11>}; for the red protocol {|01>, |10>}.
struct SubspaceAmplitudes {
  std::complex<double> c0{1.0, 0.0};
  std::complex<double> c1{0.0, 0.0};
  double t = 0;

  double norm_squared() const { return std::norm(c0) + std::norm(c1); }
};

/// Closed-form no-click evolution. Uses a complex g' = sqrt(gamma_e^2/16 - g^2)
/// so both the damped and oscillating regimes share one expression.
SubspaceAmplitudes subspace_amplitudes(double g, double gamma_e, double t);

/// Heralded single-photon rate r0 = 4 g0^2 n_p ge / (ge + gi)^2, scaled by the
/// detector efficiency (signal-mode couplings).
double heralding_rate(const TransducerParams& p, double n_p);

/// Probability of no click up to t: |c0|^2 + |c1|^2.
double survival_probability(double g, double gamma_e, double t);

/// Heralded pair rate for pulse duration delta_t followed by reset t_reset:
/// 2 r0 exp(-r0 dt) dt / (dt + t_reset).
double entanglement_rate(double r0, double delta_t, double t_reset);

struct PulseOptimum {
  double delta_t = 0;
  double rate = 0;
  /// True when the maximum sits on the lower edge of the search window
  /// (t_reset -> 0, where shorter pulses are always better).
  bool at_boundary = false;
};

/// Search window used by optimal_pulse_duration: [1e-3, 1e3] * max(1/r0, t_r).
struct PulseWindow {
  double lo = 0;
  double hi = 0;
};
PulseWindow pulse_search_window(double r0, double t_reset);

/// Maximizes entanglement_rate over delta_t with a 128-point log scan and
/// golden-section refinement; ties go to the shorter pulse.
PulseOptimum optimal_pulse_duration(double r0, double t_reset);

/// Infidelity of a stored |01> +/- |10> pair after `wait`: 1 - exp(-gamma_mw wait).
double storage_infidelity(double gamma_mw, double wait);

/// Threshold above which g / (ge + gi) leaves the heralding regime.
inline constexpr double kValidityRatio = 0.1;

struct OperatingPoint {
  double pump_power = 0;
  double n_p = 0;
  double g = 0;
  double coupling_ratio = 0;  // g / (ge_sig + gi_sig)
  double r0 = 0;
  double delta_t = 0;
  double r_e = 0;              // raw heralded pair rate
  double delivered_rate = 0;   // after purification (== r_e otherwise)
  double success_probability = 1;
  double pair_infidelity = 0;  // simultaneous-pair term
  double multiphoton_infidelity = 0;  // blue only
  double imbalance_infidelity = 0;    // unequal emission rates of the two nodes
  double dark_infidelity = 0;
  double storage_infidelity = 0;
  double fidelity = 1;
  double ebit_rate = 0;
  double heating = 0;
  bool validity_violation = false;
  bool pulse_at_boundary = false;
};

/// Full single-channel operating point for one protocol variant, both nodes
/// identical.
OperatingPoint operating_point(const TransducerParams& p, const ProtocolConfig& c,
                               const CalibrationRecord& cal = CalibrationRecord::builtin());

/// Same for two nodes that may differ. Per-node quantities (g, ratio,
/// heating) are reported for the node with the larger coupling ratio; the
/// herald rate uses the mean of the two single-node rates.
OperatingPoint operating_point(const TransducerParams& left, const TransducerParams& right,
                               const ProtocolConfig& c,
                               const CalibrationRecord& cal = CalibrationRecord::builtin());

/// Completes the fidelity fields of `op` (rates already filled in) starting
/// from the heralded-pair infidelity `raw`: dark counts, storage and
/// purification are applied on top.
void apply_fidelity_budget(OperatingPoint& op, double raw, const TransducerParams& left,
                           const TransducerParams& right, const ProtocolConfig& c);

}  // namespace hent
