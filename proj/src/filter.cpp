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

#include "hent/filter.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace hent {

namespace {
constexpr double kTwoPi = 2 * 3.141592653589793;
constexpr int kStopbandGrid = 1001;

std::complex<double> denominator(const RingStage& s, double detuning) {
  return {0.5 * (s.kappa_i + 2.0 * s.kappa_e), kTwoPi * (detuning - s.f0_offset)};
}
}  // namespace

void RingStage::validate() const {
  if (!(kappa_i >= 0)) throw std::invalid_argument("kappa_i must be >= 0");
  if (!(kappa_e > 0)) throw std::invalid_argument("kappa_e must be > 0");
  if (!std::isfinite(f0_offset)) throw std::invalid_argument("f0_offset must be finite");
}

std::complex<double> stage_through_response(const RingStage& stage, double detuning) {
  return 1.0 - stage.kappa_e / denominator(stage, detuning);
}

std::complex<double> stage_drop_response(const RingStage& stage, double detuning) {
  return stage.kappa_e / denominator(stage, detuning);
}

std::complex<double> cascade_response(std::span<const RingStage> stages, double detuning) {
  if (stages.empty()) throw std::invalid_argument("cascade needs at least one stage");
  std::complex<double> t = 1.0;
  for (const auto& s : stages) t *= stage_through_response(s, detuning);
  return t;
}

double power_db(std::complex<double> amplitude) { return 10.0 * std::log10(std::norm(amplitude)); }

void FilterSpec::validate() const {
  if (n_stages < 1) throw std::invalid_argument("n_stages must be >= 1");
  if (!(kappa_i >= 0)) throw std::invalid_argument("kappa_i must be >= 0");
  if (!(kappa_e_mean > 0)) throw std::invalid_argument("kappa_e_mean must be > 0");
  if (!(kappa_e_std >= 0) || !(f0_std >= 0)) throw std::invalid_argument("spreads must be >= 0");
  if (!(stop_bandwidth >= 0)) throw std::invalid_argument("stop_bandwidth must be >= 0");
}

std::vector<RingStage> FilterSpec::nominal() const {
  validate();
  return std::vector<RingStage>(n_stages, RingStage{kappa_i, kappa_e_mean, 0.0});
}

double worst_stopband_db(std::span<const RingStage> stages, double stop_bandwidth) {
  const double half = 0.5 * stop_bandwidth;
  auto db = [&](double d) { return power_db(cascade_response(stages, d)); };
  if (half == 0) return db(0.0);

  int best = 0;
  double best_db = -std::numeric_limits<double>::infinity();
  auto grid = [&](int i) { return -half + stop_bandwidth * i / (kStopbandGrid - 1); };
  for (int i = 0; i < kStopbandGrid; ++i) {
    const double v = db(grid(i));
    if (v > best_db) {
      best_db = v;
      best = i;
    }
  }
  // Golden-section refinement between the neighbouring grid points.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid(std::max(best - 1, 0)), b = grid(std::min(best + 1, kStopbandGrid - 1));
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = db(x1), f2 = db(x2);
  for (int it = 0; it < 100 && b - a > 1e-6; ++it) {
    if (f1 >= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a); f1 = db(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a); f2 = db(x2);
    }
  }
  return std::max({best_db, f1, f2});
}

std::vector<RingStage> sample_stages(const FilterSpec& spec, std::uint64_t seed, std::size_t draw) {
  StreamRng rng(seed, draw);
  std::vector<RingStage> stages(spec.n_stages);
  for (auto& s : stages) {
    s.kappa_i = spec.kappa_i;
    do {
      s.kappa_e = spec.kappa_e_mean + spec.kappa_e_std * rng.normal();
    } while (!(s.kappa_e > 0));
    s.f0_offset = spec.f0_std * rng.normal();
  }
  return stages;
}

FilterStatistics tolerance_monte_carlo(const FilterSpec& spec, std::size_t draws,
                                       std::uint64_t seed, Execution exec) {
  spec.validate();
  if (draws < 1) throw std::invalid_argument("draws must be >= 1");

  FilterStatistics stats;
  stats.draws.resize(draws);
  const auto n = static_cast<std::int64_t>(draws);
  auto one = [&](std::int64_t i) {
    const auto stages = sample_stages(spec, seed, static_cast<std::size_t>(i));
    FilterDraw& d = stats.draws[i];
    d.index = static_cast<std::size_t>(i);
    d.worst_extinction_db = worst_stopband_db(stages, spec.stop_bandwidth);
    d.insertion_loss_db = power_db(cascade_response(stages, spec.signal_offset));
    d.pass = d.worst_extinction_db <= spec.extinction_target_db &&
             d.insertion_loss_db >= spec.insertion_loss_target_db;
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) one(i);
  }

  std::size_t passed = 0;
  for (const auto& d : stats.draws) {
    passed += d.pass;
    stats.mean_worst_extinction_db += d.worst_extinction_db;
    stats.mean_insertion_loss_db += d.insertion_loss_db;
  }
  stats.pass_fraction = static_cast<double>(passed) / static_cast<double>(draws);
  stats.mean_worst_extinction_db /= static_cast<double>(draws);
  stats.mean_insertion_loss_db /= static_cast<double>(draws);
  return stats;
}

void FilterStatistics::write_csv(std::ostream& out) const {
  out << "draw,worst_extinction_db,insertion_loss_db,pass\n";
  for (const auto& d : draws)
    out << d.index << ',' << detail::format_double(d.worst_extinction_db) << ','
        << detail::format_double(d.insertion_loss_db) << ',' << (d.pass ? 1 : 0) << '\n';
}

void FilterStatistics::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace hent
