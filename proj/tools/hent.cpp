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
#include "hent/calibration.hpp"
#include "hent/filter.hpp"
#include "hent/scenario.hpp"
#include "hent/sweep.hpp"
#include "hent/table.hpp"
#include "hent/trajectory.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Common {
  std::string scenario;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_scenario = true) {
  if (with_scenario) cmd->add_option("-s,--scenario", c.scenario, "Scenario file")->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", c.output, "Output path (default: stdout)");
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--trials", c.trials, "Monte Carlo trials");
  cmd->add_option("--threads", c.threads, "Worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

hent::Scenario load_scenario(const Common& c) {
  hent::Scenario s = c.scenario.empty() ? hent::Scenario::parse("") : hent::Scenario::load(c.scenario);
  if (c.seed) s.seed = *c.seed;
  if (c.trials) s.trials = *c.trials;
  if (!c.output.empty()) s.output = c.output;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded microwave entanglement via optical-microwave transducers"};
  app.require_subcommand(1);

  Common sweep_opts;
  std::string engine;
  auto* sweep = app.add_subcommand("sweep", "Rate/fidelity sweep to CSV");
  add_common(sweep, sweep_opts);
  sweep->add_option("--engine", engine, "analytic | trajectory | both");

  Common traj_opts;
  double power = 1.29e-4;
  std::string variant = "red";
  std::optional<double> pulse;
  double window = 0;
  auto* traj = app.add_subcommand("trajectory", "Joint herald ensemble at one pump power");
  add_common(traj, traj_opts);
  traj->add_option("--power", power, "Pump power (W)")->check(CLI::PositiveNumber);
  traj->add_option("--variant", variant, "red | blue");
  traj->add_option("--pulse", pulse, "Pulse duration (s), default: rate optimum")->check(CLI::PositiveNumber);
  traj->add_option("--coincidence-window", window, "Detector gate after a click (s)")->check(CLI::NonNegativeNumber);

  Common filter_opts;
  hent::FilterSpec fspec;
  std::int64_t draws = 1000;
  double f0_std = fspec.f0_std;
  double kappa_e_std_hz = fspec.kappa_e_std / (2 * hent::constants::pi);
  auto* filter = app.add_subcommand("filter", "Pump-filter tolerance Monte Carlo");
  add_common(filter, filter_opts, false);
  filter->add_option("--draws", draws, "Monte Carlo draws");
  filter->add_option("--stages", fspec.n_stages, "Rings in the cascade");
  filter->add_option("--f0-std", f0_std, "Resonance spread (Hz)");
  filter->add_option("--kappa-e-std", kappa_e_std_hz, "Coupling spread, kappa_e / 2 pi (Hz)");

  Common cal_opts;
  double ratio_min = 1e-4, ratio_max = 1e-2;
  int ratio_points = 9;
  auto* calibrate = app.add_subcommand("calibrate", "Fit heralded infidelity against g / gamma");
  add_common(calibrate, cal_opts, false);
  calibrate->add_option("--min", ratio_min, "Smallest g / gamma")->check(CLI::PositiveNumber);
  calibrate->add_option("--max", ratio_max, "Largest g / gamma")->check(CLI::PositiveNumber);
  calibrate->add_option("--points", ratio_points, "Log-spaced ratios")->check(CLI::Range(2, 1000));

  CLI11_PARSE(app, argc, argv);

  const auto threads = [](int n) {
    if (n > 0) omp_set_num_threads(n);
  };

  try {
    if (*sweep) {
      threads(sweep_opts.threads);
      hent::Scenario s = load_scenario(sweep_opts);
      if (!engine.empty()) s.engine = hent::parse_engine(engine);
      s.validate();
      const auto points = hent::run_sweep(s);
      if (s.output.empty()) hent::write_table(points, s, std::cout);
      else hent::emit_table(points, s, s.output);
      return 0;
    }

    if (*traj) {
      threads(traj_opts.threads);
      hent::Scenario s = load_scenario(traj_opts);
      s.validate();
      const hent::Detuning d = hent::parse_detuning(variant);
      double dt = 0;
      if (pulse) {
        dt = *pulse;
      } else {
        hent::ProtocolConfig c = s.protocol;
        c.pump_power = power;
        c.detuning = d;
        dt = hent::operating_point(s.left, s.right, c).delta_t;
      }
      hent::JointHeraldOptions opt;
      opt.coincidence_window = window;
      const auto res = hent::herald_joint_pair(s.left, s.right, power, d, dt,
                                               static_cast<std::size_t>(s.trials), s.seed, opt);
      write_output(s.output, res.to_record());
      return 0;
    }

    if (*filter) {
      threads(filter_opts.threads);
      if (draws < 1) throw std::invalid_argument("draws must be >= 1");
      fspec.f0_std = f0_std;
      fspec.kappa_e_std = 2 * hent::constants::pi * kappa_e_std_hz;
      const auto stats = hent::tolerance_monte_carlo(fspec, static_cast<std::size_t>(draws),
                                                     filter_opts.seed.value_or(1));
      std::cerr << "pass fraction " << stats.pass_fraction << ", mean worst stopband "
                << stats.mean_worst_extinction_db << " dB, mean insertion loss "
                << stats.mean_insertion_loss_db << " dB\n";
      if (filter_opts.output.empty()) stats.write_csv(std::cout);
      else stats.save_csv(filter_opts.output);
      return 0;
    }

    if (*calibrate) {
      threads(cal_opts.threads);
      if (!(ratio_min < ratio_max)) throw std::invalid_argument("--min must be below --max");
      std::vector<double> ratios(ratio_points);
      for (int i = 0; i < ratio_points; ++i)
        ratios[i] = ratio_min * std::pow(ratio_max / ratio_min, double(i) / (ratio_points - 1));
      const std::size_t trials = static_cast<std::size_t>(cal_opts.trials.value_or(4000));
      if (trials < 2) throw std::invalid_argument("trials must be >= 2");
      const std::uint64_t seed = cal_opts.seed.value_or(20260101);
      hent::CalibrationRecord rec;
      for (auto d : {hent::Detuning::Blue, hent::Detuning::Red}) {
        const auto fit = hent::measure_infidelity_scaling(d, ratios, trials, seed);
        std::cerr << hent::to_string(d) << ": eps = " << fit.prefactor << " (+/- " << fit.prefactor_se
                  << ") * x^" << fit.exponent << " (+/- " << fit.exponent_se << "), rms log residual "
                  << fit.residual << (fit.residual_flag ? "  [poor fit]" : "") << '\n';
        (d == hent::Detuning::Blue ? rec.blue : rec.red) = {fit.prefactor, fit.exponent, fit.residual};
      }
      write_output(cal_opts.output, rec.serialize());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
