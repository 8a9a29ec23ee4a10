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

#include "hent/analytic.hpp"

#include "hent/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hent {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};
constexpr double kSeriesThreshold = 1e-6;

}  // namespace

SubspaceAmplitudes subspace_amplitudes(double g, double gamma_e, double t) {
  if (t < 0) throw std::invalid_argument("time must be >= 0");
  SubspaceAmplitudes out;
  out.t = t;
  if (t == 0) return out;

  const double quarter = 0.25 * gamma_e;
  const cd gp = std::sqrt(cd(quarter * quarter - g * g, 0.0));

  if (std::abs(gp * t) < kSeriesThreshold) {
    // sinh(g't)/g' and cosh(g't) to second order in g't.
    const cd x2 = gp * gp * t * t;
    const cd sinh_over = t * (1.0 + x2 / 6.0);
    const cd cosh_v = 1.0 + 0.5 * x2;
    const double decay = std::exp(-quarter * t);
    out.c0 = decay * (cosh_v + quarter * sinh_over);
    out.c1 = -kI * g * decay * sinh_over;
    return out;
  }

  // Eigenvalue form; lambda_plus is written to avoid cancellation when g << gamma.
  const cd lambda_plus = -(g * g) / (quarter + gp);
  const cd lambda_minus = -quarter - gp;
  const cd e_plus = std::exp(lambda_plus * t);
  const cd e_minus = std::exp(lambda_minus * t);
  out.c0 = ((gp + quarter) * e_plus + lambda_plus * e_minus) / (2.0 * gp);
  out.c1 = -kI * g * (e_plus - e_minus) / (2.0 * gp);
  return out;
}

double heralding_rate(const TransducerParams& p, double n_p) {
  if (n_p < 0) throw std::invalid_argument("photon number must be >= 0");
  const double total = p.gamma_sig();
  if (total <= 0) throw std::invalid_argument("total signal-mode loss is zero");
  return 4.0 * p.g0 * p.g0 * n_p * p.gamma_e_sig / (total * total) * p.detector_efficiency;
}

double survival_probability(double g, double gamma_e, double t) {
  return std::clamp(subspace_amplitudes(g, gamma_e, t).norm_squared(), 0.0, 1.0);
}

double entanglement_rate(double r0, double delta_t, double t_reset) {
  if (!(delta_t > 0)) throw std::invalid_argument("pulse duration must be > 0");
  if (t_reset < 0) throw std::invalid_argument("reset time must be >= 0");
  if (r0 <= 0) return 0.0;
  return 2.0 * r0 * std::exp(-r0 * delta_t) * delta_t / (delta_t + t_reset);
}

PulseWindow pulse_search_window(double r0, double t_reset) {
  const double scale = std::max(1.0 / r0, t_reset);
  return {1e-3 * scale, 1e3 * scale};
}

PulseOptimum optimal_pulse_duration(double r0, double t_reset) {
  if (!(r0 > 0)) throw std::invalid_argument("r0 must be > 0");
  const PulseWindow win = pulse_search_window(r0, t_reset);
  const double log_lo = std::log(win.lo);
  const double log_hi = std::log(win.hi);
  constexpr int kCoarse = 128;
  auto rate_at = [&](double log_dt) { return entanglement_rate(r0, std::exp(log_dt), t_reset); };

  int best = 0;
  double best_rate = -1;
  for (int i = 0; i < kCoarse; ++i) {
    const double x = log_lo + (log_hi - log_lo) * i / (kCoarse - 1);
    const double r = rate_at(x);
    if (r > best_rate) {  // strict: ties keep the shorter pulse
      best_rate = r;
      best = i;
    }
  }
  auto grid = [&](int i) { return log_lo + (log_hi - log_lo) * i / (kCoarse - 1); };

  PulseOptimum out{std::exp(grid(best)), best_rate, false};
  if (best == 0 || best == kCoarse - 1) {
    out.at_boundary = true;
    return out;
  }

  // Golden-section maximization on the bracketing grid cell pair.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid(best - 1), b = grid(best + 1);
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = rate_at(x1), f2 = rate_at(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    if (f1 >= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a); f1 = rate_at(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a); f2 = rate_at(x2);
    }
  }
  const double x = 0.5 * (a + b);
  const double r = rate_at(x);
  if (r > out.rate) {
    out.delta_t = std::exp(x);
    out.rate = r;
  }
  return out;
}

double storage_infidelity(double gamma_mw, double wait) {
  if (!(wait >= 0)) throw std::invalid_argument("wait must be >= 0");
  if (gamma_mw <= 0 || wait == 0) return 0.0;
  if (std::isinf(wait)) return 1.0;
  return -std::expm1(-gamma_mw * wait);
}

OperatingPoint operating_point(const TransducerParams& p, const ProtocolConfig& c,
                               const CalibrationRecord& cal) {
  return operating_point(p, p, c, cal);
}

OperatingPoint operating_point(const TransducerParams& left, const TransducerParams& right,
                               const ProtocolConfig& c, const CalibrationRecord& cal) {
  left.validate();
  right.validate();
  c.validate();

  struct Node {
    double n_p, g, ratio, r0, heating;
  };
  auto node = [&](const TransducerParams& p) {
    Node n;
    n.n_p = pump_photon_number(p, c.pump_power);
    n.g = effective_coupling(p.g0, n.n_p);
    n.ratio = n.g / p.gamma_sig();
    n.r0 = heralding_rate(p, n.n_p);
    n.heating = heating_power(p, c.pump_power);
    return n;
  };
  const Node l = node(left), r = node(right);
  const Node& hot = r.ratio > l.ratio ? r : l;

  OperatingPoint op;
  op.pump_power = c.pump_power;
  op.n_p = hot.n_p;
  op.g = hot.g;
  op.coupling_ratio = hot.ratio;
  op.validity_violation = l.ratio > kValidityRatio || r.ratio > kValidityRatio;
  op.r0 = 0.5 * (l.r0 + r.r0);
  op.heating = std::max(l.heating, r.heating);
  const double t_reset = std::max(left.t_reset, right.t_reset);

  if (c.pulse_duration) {
    op.delta_t = *c.pulse_duration;
    op.r_e = entanglement_rate(op.r0, op.delta_t, t_reset);
  } else if (op.r0 > 0) {
    const PulseOptimum opt = optimal_pulse_duration(op.r0, t_reset);
    op.delta_t = opt.delta_t;
    op.r_e = opt.rate;
    op.pulse_at_boundary = opt.at_boundary;
  }

  op.pair_infidelity = 0.5 * (cal.red.infidelity(l.ratio) + cal.red.infidelity(r.ratio));
  if (c.detuning == Detuning::Blue)
    op.multiphoton_infidelity = std::max(
        0.0, 0.5 * (cal.blue.infidelity(l.ratio) + cal.blue.infidelity(r.ratio)) - op.pair_infidelity);
  // Unequal emission rates leave sqrt(r_l)|10> + sqrt(r_r)|01>.
  if (l.r0 + r.r0 > 0) {
    const double s = std::sqrt(l.r0) + std::sqrt(r.r0);
    op.imbalance_infidelity = std::max(0.0, 1.0 - s * s / (2.0 * (l.r0 + r.r0)));
  }
  apply_fidelity_budget(op, op.pair_infidelity + op.multiphoton_infidelity + op.imbalance_infidelity,
                        left, right, c);
  return op;
}

void apply_fidelity_budget(OperatingPoint& op, double raw, const TransducerParams& left,
                           const TransducerParams& right, const ProtocolConfig& c) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double t_reset = std::max(left.t_reset, right.t_reset);
  const double dark = 0.5 * (left.dark_count_rate + right.dark_count_rate);
  const double gamma_mw = 0.5 * (left.gamma_mw + right.gamma_mw);
  double eps = raw;

  // False heralds from dark counts in either detector; they carry no overlap
  // with the target pair.
  op.dark_infidelity = 0;
  if (dark > 0 && op.delta_t > 0) {
    const double p_dark = 2.0 * dark * op.delta_t;
    const double p_true = op.r_e * (op.delta_t + t_reset);
    const double f = p_dark / (p_dark + p_true);
    op.dark_infidelity = f * (1.0 - eps);
    eps += op.dark_infidelity;
  }

  const auto mean_wait = [&](double rate) { return rate > 0 ? 1.0 / rate : kInf; };
  const bool on_demand = c.storage == Storage::OnDemandWorstCase;

  op.success_probability = 1;
  if (!c.purification) {
    op.delivered_rate = op.r_e;
    op.storage_infidelity = on_demand ? storage_infidelity(gamma_mw, mean_wait(op.r_e)) : 0.0;
    eps += op.storage_infidelity;
  } else {
    // The kept pair idles until the sacrificial pair is heralded.
    const double idle = storage_infidelity(gamma_mw, mean_wait(op.r_e));
    const double eps_kept = std::min(eps + idle, kMaxMixtureInfidelity);
    const double eps_sac = std::min(eps, kMaxMixtureInfidelity);
    const PurificationOutcome out = purify(mixture_state(eps_kept).rho,
                                           mixture_state(eps_sac).rho, c.gate_fidelity);
    op.success_probability = out.success_probability;
    op.delivered_rate = 0.5 * op.r_e * out.success_probability;
    const double stored =
        on_demand ? storage_infidelity(gamma_mw, mean_wait(op.delivered_rate)) : 0.0;
    op.storage_infidelity = idle + stored;
    eps = (1.0 - out.output_fidelity) + stored;
  }

  op.fidelity = std::clamp(1.0 - eps, 0.0, 1.0);
  op.ebit_rate = op.delivered_rate * hashing_yield(1.0 - op.fidelity);
}

}  // namespace hent
