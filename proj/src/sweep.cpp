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

#include "hent/sweep.hpp"

#include "hent/trajectory.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hent {

RateFidelityPoint multiplexed_rate(const RateFidelityPoint& point, int channels) {
  if (channels < 1) throw std::invalid_argument("channels must be >= 1");
  RateFidelityPoint out = point;
  const double k = channels;
  out.channels = point.channels * channels;
  out.r_e *= k;
  out.heating *= k;
  for (auto& v : out.variants) {
    v.op.r_e *= k;
    v.op.delivered_rate *= k;
    v.op.ebit_rate *= k;
    v.op.heating *= k;
    if (v.trajectory) {
      v.trajectory->rate *= k;
      v.trajectory->rate_se *= k;
    }
  }
  return out;
}

PowerForRate pump_power_for_rate(const TransducerParams& left, const TransducerParams& right,
                                 const ProtocolConfig& protocol, double target) {
  if (!(target > 0)) throw std::invalid_argument("target rate must be > 0");
  ProtocolConfig c = protocol;
  c.detuning = Detuning::Red;
  c.purification = false;
  auto rate = [&](double log_p) {
    c.pump_power = std::exp(log_p);
    return operating_point(left, right, c).r_e;
  };

  // Rate rises with power, then saturates or falls once the pulse is pinned;
  // locate the maximum first and bisect below it.
  const double lo = std::log(1e-15), hi = std::log(1.0);
  constexpr int kScan = 200;
  double best_lp = lo, best = -1;
  for (int i = 0; i < kScan; ++i) {
    const double lp = lo + (hi - lo) * i / (kScan - 1);
    const double r = rate(lp);
    if (r > best) {
      best = r;
      best_lp = lp;
    }
  }
  if (best < target) return {std::exp(best_lp), false};
  double a = lo, b = best_lp;
  if (rate(a) >= target) return {std::exp(a), true};
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double m = 0.5 * (a + b);
    (rate(m) < target ? a : b) = m;
  }
  return {std::exp(b), true};
}

namespace {

RateFidelityPoint sweep_point(const Scenario& s, const CalibrationRecord& cal, std::size_t index,
                              double axis_value) {
  RateFidelityPoint pt;
  pt.index = index;
  pt.axis_value = axis_value;
  if (s.axis == SweepAxis::PumpPower) {
    pt.pump_power = axis_value;
  } else {
    const PowerForRate p = pump_power_for_rate(s.left, s.right, s.protocol, axis_value);
    pt.pump_power = p.pump_power;
    pt.target_reached = p.reached;
  }

  ProtocolConfig base = s.protocol;
  base.pump_power = pt.pump_power;
  base.channels = 1;

  // Raw heralded ensembles, one per detuning in use, shared across options.
  const bool with_traj = s.engine != Engine::Analytic;
  std::map<Detuning, std::optional<JointEnsembleResult>> raw;

  for (const auto& opt : s.variants) {
    ProtocolConfig c = base;
    c.detuning = opt.detuning;
    c.purification = opt.purification;
    c.storage = opt.storage;
    VariantPoint vp{opt, operating_point(s.left, s.right, c, cal), std::nullopt};

    if (with_traj && vp.op.r0 > 0 && vp.op.delta_t > 0) {
      auto it = raw.find(opt.detuning);
      if (it == raw.end()) {
        std::optional<JointEnsembleResult> res;
        JointHeraldOptions jo;
        jo.execution = Execution::Serial;  // points already run in parallel
        try {
          res = herald_joint_pair(s.left, s.right, pt.pump_power, opt.detuning, vp.op.delta_t,
                                  static_cast<std::size_t>(s.trials),
                                  derive_seed(s.seed, index, static_cast<std::uint64_t>(opt.detuning)),
                                  jo);
        } catch (const TrajectoryError&) {
          // Cutoff never converged: leave the columns empty, keep the sweep.
        }
        it = raw.emplace(opt.detuning, std::move(res)).first;
      }
      if (const auto& r = it->second; r && r->heralds > 0) {
        OperatingPoint t = vp.op;
        t.r_e = r->empirical_rate();
        apply_fidelity_budget(t, r->infidelity, s.left, s.right, c);
        OperatingPoint shifted = t;
        apply_fidelity_budget(shifted, r->infidelity + r->infidelity_se, s.left, s.right, c);
        TrajectoryColumns tc;
        tc.fidelity = t.fidelity;
        tc.fidelity_se = std::abs(t.fidelity - shifted.fidelity);
        tc.rate = t.delivered_rate;
        tc.rate_se = t.r_e > 0 ? r->empirical_rate_se() * t.delivered_rate / t.r_e : 0.0;
        tc.heralds = r->heralds;
        vp.trajectory = tc;
      }
    }
    pt.variants.push_back(std::move(vp));
  }

  const OperatingPoint& first = pt.variants.front().op;
  pt.n_p = first.n_p;
  pt.g = first.g;
  pt.coupling_ratio = first.coupling_ratio;
  pt.r0 = first.r0;
  pt.delta_t = first.delta_t;
  pt.r_e = first.r_e;
  pt.heating = first.heating;
  pt.validity_violation = first.validity_violation;
  return pt;
}

}  // namespace

std::vector<RateFidelityPoint> run_sweep(const Scenario& s, Execution exec) {
  if (s.calibration.empty()) return run_sweep(s, CalibrationRecord::builtin(), exec);
  return run_sweep(s, CalibrationRecord::load(s.calibration), exec);
}

std::vector<RateFidelityPoint> run_sweep(const Scenario& s, const CalibrationRecord& cal,
                                         Execution exec) {
  s.validate();
  const std::vector<double> axis = s.axis_values();
  std::vector<RateFidelityPoint> out(axis.size());
  const auto n = static_cast<std::int64_t>(axis.size());
  auto one = [&](std::int64_t i) {
    out[i] = multiplexed_rate(sweep_point(s, cal, static_cast<std::size_t>(i), axis[i]),
                              s.protocol.channels);
  };
  if (exec == Execution::Parallel) {
    // Exceptions must not escape the parallel region.
    std::vector<std::exception_ptr> errors(axis.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        one(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::int64_t i = 0; i < n; ++i) one(i);
  }
  return out;
}

}  // namespace hent
