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

#include "hent/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hent {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void TransducerParams::validate() const {
  require(std::isfinite(g0) && g0 >= 0, "g0 must be a finite rate >= 0");
  require(gamma_e_sig >= 0 && gamma_i_sig >= 0, "signal-mode loss rates must be >= 0");
  require(gamma_e_pump >= 0 && gamma_i_pump >= 0, "pump-mode loss rates must be >= 0");
  require(gamma_mw >= 0, "gamma_mw must be >= 0");
  require(lambda_pump > 0, "lambda_pump must be > 0");
  require(t_reset >= 0, "t_reset must be >= 0");
  require(detector_efficiency >= 0 && detector_efficiency <= 1,
          "detector_efficiency must lie in [0, 1]");
  require(dark_count_rate >= 0, "dark_count_rate must be >= 0");
  require(g0 < gamma_sig(), "g0 must be smaller than the total signal-mode loss");
}

double TransducerParams::herald_efficiency() const {
  const double total = gamma_sig();
  if (total <= 0) throw std::invalid_argument("total signal-mode loss is zero");
  return detector_efficiency * gamma_e_sig / total;
}

TransducerParams TransducerParams::strong_coupling(double extrinsic_ratio) const {
  require(extrinsic_ratio > 0, "extrinsic ratio must be > 0");
  TransducerParams out = *this;
  out.gamma_e_sig = extrinsic_ratio * gamma_i_sig;
  out.t_reset = 0.0;
  return out;
}

std::string_view to_string(Detuning d) { return d == Detuning::Blue ? "blue" : "red"; }

std::string_view to_string(Storage s) {
  return s == Storage::Immediate ? "immediate" : "on_demand_worst_case";
}

Detuning parse_detuning(std::string_view text) {
  if (text == "blue") return Detuning::Blue;
  if (text == "red") return Detuning::Red;
  throw std::invalid_argument("unknown detuning '" + std::string(text) + "' (expected blue|red)");
}

Storage parse_storage(std::string_view text) {
  if (text == "immediate") return Storage::Immediate;
  if (text == "on_demand_worst_case") return Storage::OnDemandWorstCase;
  throw std::invalid_argument("unknown storage '" + std::string(text) +
                              "' (expected immediate|on_demand_worst_case)");
}

void ProtocolConfig::validate() const {
  require(std::isfinite(pump_power) && pump_power >= 0, "pump_power must be >= 0");
  if (pulse_duration) require(*pulse_duration > 0, "pulse_duration must be > 0");
  require(gate_fidelity >= 0 && gate_fidelity <= 1, "gate_fidelity must lie in [0, 1]");
  require(channels >= 1, "channels must be >= 1");
}

double photon_energy(double lambda) {
  require(lambda > 0, "wavelength must be > 0");
  return constants::planck * constants::speed_of_light / lambda;
}

double pump_photon_number(const TransducerParams& p, double power) {
  require(power >= 0, "pump power must be >= 0");
  const double total = p.gamma_e_pump + p.gamma_i_pump;
  require(total > 0, "total pump-mode loss is zero");
  return 4.0 * p.gamma_e_pump / (total * total) * power / photon_energy(p.lambda_pump);
}

double effective_coupling(double g0, double n_p) {
  require(n_p >= 0, "photon number must be >= 0");
  return g0 * std::sqrt(n_p);
}

double heating_power(const TransducerParams& p, double power) {
  require(power >= 0, "pump power must be >= 0");
  const double total = p.gamma_e_pump + p.gamma_i_pump;
  if (total <= 0) return 0.0;
  return power * 4.0 * p.gamma_e_pump * p.gamma_i_pump / (total * total);
}

}  // namespace hent
