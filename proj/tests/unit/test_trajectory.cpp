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
#include "hent/reference.hpp"
#include "hent/trajectory.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace hent;
using cd = std::complex<double>;

namespace {

double binomial_sigma(double p, std::size_t n) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); }

}  // namespace

TEST_CASE("Fock index bijection") {
  const FockCutoffs c{3, 2};
  TruncatedTwoModeState s(c);
  CHECK(s.dimension() == 12);
  for (int i = 0; i < s.dimension(); ++i) {
    const auto [na, nb] = s.levels(i);
    CHECK(s.index(na, nb) == i);
  }
  CHECK_THROWS_AS(s.index(4, 0), std::out_of_range);
  CHECK_THROWS_AS(s.levels(12), std::out_of_range);
  CHECK(initial_state(Detuning::Red, c)(0, 1) == cd(1));
  CHECK(initial_state(Detuning::Blue, c)(0, 0) == cd(1));
}

TEST_CASE("effective generator structure") {
  const FockCutoffs c{3, 3};
  SUBCASE("decoupled decay") {
    for (Detuning v : {Detuning::Blue, Detuning::Red}) {
      const auto gen = build_effective_generator(v, 0, 1e8, c);
      const TruncatedTwoModeState s(c);
      for (int i = 0; i < c.dimension(); ++i)
        for (int j = 0; j < c.dimension(); ++j) {
          const cd expected = i == j ? cd(-0.5e8 * s.levels(i).first) : cd(0);
          CHECK(std::abs(gen.matrix(i, j) - expected) == 0.0);
        }
    }
  }
  SUBCASE("two-level blocks") {
    const double g = 3e6, gamma = 1e8;
    const auto red = build_effective_generator(Detuning::Red, g, gamma, {1, 1});
    const auto blue = build_effective_generator(Detuning::Blue, g, gamma, {1, 1});
    const TruncatedTwoModeState s({1, 1});
    auto block = [&](const EffectiveGenerator& gen, int lo, int hi) {
      Eigen::Matrix2cd m;
      m << gen.matrix(lo, lo), gen.matrix(lo, hi), gen.matrix(hi, lo), gen.matrix(hi, hi);
      return m;
    };
    Eigen::Matrix2cd ode;
    ode << 0, cd(0, -g), cd(0, -g), -0.5 * gamma;
    CHECK((block(red, s.index(0, 1), s.index(1, 0)) - ode).norm() == 0.0);
    CHECK((block(blue, s.index(0, 0), s.index(1, 1)) - ode).norm() == 0.0);
  }
  SUBCASE("red conserves excitation number") {
    const auto gen = build_effective_generator(Detuning::Red, 1e6, 1e8, c);
    const TruncatedTwoModeState s(c);
    for (int i = 0; i < c.dimension(); ++i)
      for (int j = 0; j < c.dimension(); ++j) {
        const auto [ai, bi] = s.levels(i);
        const auto [aj, bj] = s.levels(j);
        if (ai + bi != aj + bj) CHECK(gen.matrix(i, j) == cd(0));
      }
  }
  CHECK_THROWS_AS(build_effective_generator(Detuning::Blue, 1, 1, {0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(build_effective_generator(Detuning::Red, -1, 1, {1, 1}), std::invalid_argument);
}

TEST_CASE("no-jump evolution") {
  const double g = 2e6, gamma = 1e8;
  SUBCASE("agrees with fixed-step RK4") {
    for (Detuning v : {Detuning::Blue, Detuning::Red}) {
      const FockCutoffs c{3, 3};
      const auto gen = build_effective_generator(v, g, gamma, c);
      const auto init = initial_state(v, c).amplitudes();
      const NoJumpPath path(gen, init, 2e-6);
      for (double t : {1e-9, 3e-8, 4e-7, 2e-6}) {
        const auto ref = reference::integrate(gen, init, t, reference::default_step(gen));
        CHECK((path.state(t) - ref).norm() <= 1e-8);
        CHECK(path.norm_squared(t) == doctest::Approx(ref.squaredNorm()).epsilon(1e-8));
      }
    }
  }
  SUBCASE("red path equals the closed form") {
    const auto gen = build_effective_generator(Detuning::Red, g, gamma, {1, 1});
    const TruncatedTwoModeState s({1, 1});
    const NoJumpPath path(gen, s.basis({1, 1}, 0, 1).amplitudes(), 1e-5);
    for (double t : {0.0, 1e-8, 1e-7, 1e-6, 1e-5}) {
      const auto psi = path.state(t);
      const auto a = subspace_amplitudes(g, gamma, t);
      CHECK(std::abs(psi(s.index(0, 1)) - a.c0) <= 1e-12);
      CHECK(std::abs(psi(s.index(1, 0)) - a.c1) <= 1e-12);
    }
    CHECK(path.support().size() == 2);
  }
  SUBCASE("norm never grows") {
    const auto gen = build_effective_generator(Detuning::Blue, 2e7, gamma, {4, 4});
    const NoJumpPath path(gen, initial_state(Detuning::Blue, {4, 4}).amplitudes(), 1e-6);
    double prev = 1;
    for (int i = 0; i <= 1000; ++i) {
      const double n = path.norm_squared(i * 1e-9);
      CHECK(n <= prev + 1e-15);
      prev = n;
    }
  }
}

TEST_CASE("click threshold search agrees with bisection on RK4") {
  const auto gen = build_effective_generator(Detuning::Blue, 1e6, 1e8, {3, 3});
  const auto init = initial_state(Detuning::Blue, {3, 3}).amplitudes();
  const double horizon = 2e-4;
  const NoJumpPath path(gen, init, horizon);
  const NoJumpPath* both[] = {&path, &path};
  for (double u : {0.99, 0.9, 0.5, 0.1}) {
    const auto fast = first_click_time(both, u);
    const auto slow = reference::first_click_time(gen, gen, init, horizon, u);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) CHECK(*fast == doctest::Approx(*slow).epsilon(2e-3));
  }
  CHECK_FALSE(first_click_time(both, 1e-30).has_value());
}

TEST_CASE("single-node trajectories") {
  SUBCASE("no coupling, no click") {
    const auto gen = build_effective_generator(Detuning::Blue, 0, 1e8, {3, 3});
    const auto init = initial_state(Detuning::Blue, {3, 3});
    for (std::uint64_t s = 0; s < 50; ++s) CHECK_FALSE(simulate_trajectory(init, gen, 1.0, 3, s).clicked);
    const auto sample = click_time_ensemble(init, gen, 1.0, 1000, 3);
    CHECK(sample.no_clicks == 1000);
  }
  SUBCASE("red click leaves the microwave mode empty") {
    const auto gen = build_effective_generator(Detuning::Red, 1e6, 1e8, {1, 1});
    const auto init = initial_state(Detuning::Red, {1, 1});
    int clicks = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto rec = simulate_trajectory(init, gen, 1e-3, 9, s);
      if (!rec.clicked) continue;
      ++clicks;
      CHECK(rec.click_time >= 0);
      CHECK(rec.click_time <= 1e-3);
      CHECK(rec.post_click_state(0, 0) == cd(1));
      CHECK(rec.post_click_state(1, 1) == cd(0));
      CHECK(rec.post_click_state(0, 1) == cd(0));
    }
    CHECK(clicks > 150);
  }
  SUBCASE("no-click probability matches survival") {
    for (Detuning v : {Detuning::Red, Detuning::Blue}) {
      const double gamma = 1e8, g = 1e-3 * gamma, duration = 1.0 / (4 * g * g / gamma);
      const FockCutoffs c = default_cutoffs(v);
      const auto gen = build_effective_generator(v, g, gamma, c);
      const std::size_t n = 20000;
      const auto sample = click_time_ensemble(initial_state(v, c), gen, duration, n, 17);
      const double p = survival_probability(g, gamma, duration);
      const double emp = static_cast<double>(sample.no_clicks) / n;
      CHECK(std::abs(emp - p) <= 3 * binomial_sigma(p, n) + (v == Detuning::Blue ? 1e-5 : 0.0));
    }
  }
  SUBCASE("click times follow the survival law") {
    const double gamma = 1e8, g = 1e5, duration = 2.0 / (4 * g * g / gamma);
    const auto gen = build_effective_generator(Detuning::Red, g, gamma, {1, 1});
    const auto sample =
        click_time_ensemble(initial_state(Detuning::Red, {1, 1}), gen, duration, 4000, 21);
    const double tail = survival_probability(g, gamma, duration);
    const double d = oracle::ks_statistic(sample.click_times, [&](double t) {
      return (1 - survival_probability(g, gamma, t)) / (1 - tail);
    });
    CHECK(oracle::ks_p_value(d, sample.click_times.size()) > 0.01);
  }
  SUBCASE("ensembles are independent of the worker count") {
    const auto gen = build_effective_generator(Detuning::Blue, 1e6, 1e8, {3, 3});
    const auto init = initial_state(Detuning::Blue, {3, 3});
    const auto a = click_time_ensemble(init, gen, 1e-4, 3000, 5, Execution::Serial);
    const auto b = click_time_ensemble(init, gen, 1e-4, 3000, 5, Execution::Parallel);
    CHECK(a.click_times == b.click_times);
    CHECK(a.no_clicks == b.no_clicks);
  }
}

TEST_CASE("node drive") {
  TransducerParams p;
  const auto d = node_drive(p, 1e-4);
  CHECK(d.g == doctest::Approx(effective_coupling(p.g0, pump_photon_number(p, 1e-4))));
  CHECK(d.gamma == 2e8);
  CHECK(d.efficiency == doctest::Approx(0.5));
}

TEST_CASE("joint heralding: ideal limit and invariants") {
  const double gamma = 1e8;
  for (double ratio : {1e-4, 1e-3}) {
    const double g = ratio * gamma, r0 = 4 * g * g / gamma;
    const auto res = herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Red, 1.5 / r0, 4000, 3);
    const auto d = diagnose(res.rho.matrix());
    CHECK(d.hermiticity_error <= 1e-12);
    CHECK(d.trace_error <= 1e-10);
    CHECK(d.min_eigenvalue >= -1e-10);
    CHECK(res.heralds + res.no_clicks + res.double_clicks + res.lost == res.trials);
    CHECK(res.plus_heralds + res.minus_heralds == res.heralds);
    CHECK(res.fidelity() >= 1 - 5 * ratio * ratio - 3 * res.infidelity_se);
    CHECK(fidelity_to_bell(res.rho, BellState::PsiPlus) == doctest::Approx(res.fidelity()).epsilon(1e-9));
  }
  CHECK_THROWS_AS(herald_joint_pair({1, 1e8}, {1, 1e8}, Detuning::Red, 0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(herald_joint_pair({1, 1e8}, {1, 1e8}, Detuning::Red, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(herald_joint_pair({1, 1e8, 0.0}, {1, 1e8}, Detuning::Red, 1, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("red heralds stay in the single-excitation subspace") {
  const double gamma = 1e8, g = 1e-2 * gamma;
  const auto res = herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Red, 1e-4, 2000, 8);
  REQUIRE(res.heralds > 0);
  for (int i = 0; i < 4; ++i) {
    CHECK(res.rho(3, i) == cd(0));
    CHECK(res.rho(i, 3) == cd(0));
  }

  const FockCutoffs c{1, 1};
  const auto gen = build_effective_generator(Detuning::Red, g, gamma, c);
  const NoJumpPath path(gen, initial_state(Detuning::Red, c).amplitudes(), 1e-6);
  const TruncatedTwoModeState s(c);
  for (Detector det : {Detector::Plus, Detector::Minus})
    for (double t : {1e-9, 1e-7, 1e-6}) {
      const auto joint = joint_post_click_state(path.state(t), path.state(t), gen, det);
      for (int i = 0; i < joint.size(); ++i) {
        const auto [la, lb] = s.levels(i / c.dimension());
        const auto [ra, rb] = s.levels(i % c.dimension());
        if (la + lb + ra + rb != 1) CHECK(joint(i) == cd(0));
      }
    }
}

TEST_CASE("mismatched couplings reduce the overlap as the closed form predicts") {
  const double gamma = 1e8, g_r = 1e-3 * gamma, g_l = 2 * g_r;
  const double r0_l = 4 * g_l * g_l / gamma, r0_r = 4 * g_r * g_r / gamma;
  const double pulse = 0.2 / r0_l;
  const auto res = herald_joint_pair({g_l, gamma}, {g_r, gamma}, Detuning::Red, pulse, 20000, 12);

  // Heralded overlap at click time t, weighted by the first-click density
  // -d/dt [N_l(t) N_r(t)] over the pulse.
  auto overlap = [&](double t) {
    const auto l = oracle::subspace_ode(g_l, gamma, t), r = oracle::subspace_ode(g_r, gamma, t);
    const cd a = l[1] * r[0], b = l[0] * r[1];
    return std::norm(a + b) / (2 * (std::norm(a) + std::norm(b)));
  };
  auto survival = [&](double t) {
    if (t == 0) return 1.0;
    const auto l = oracle::subspace_ode(g_l, gamma, t), r = oracle::subspace_ode(g_r, gamma, t);
    return (std::norm(l[0]) + std::norm(l[1])) * (std::norm(r[0]) + std::norm(r[1]));
  };
  const int n = 400;
  double num = 0, den = 0;
  for (int i = 0; i < n; ++i) {
    const double t0 = pulse * i / n, t1 = pulse * (i + 1) / n;
    const double w = survival(t0) - survival(t1);
    num += w * overlap(0.5 * (t0 + t1));
    den += w;
  }
  const double expected = num / den;
  CHECK(expected == doctest::Approx(0.9).epsilon(0.01));
  CHECK(std::abs(res.fidelity() - expected) <= 3 * res.infidelity_se + 1e-4);
  (void)r0_r;
}

TEST_CASE("blue heralds are worse than red") {
  const double gamma = 1e8, g = 1e-2 * gamma, r0 = 4 * g * g / gamma;
  const auto red = herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Red, 1.5 / r0, 3000, 4);
  const auto blue = herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Blue, 1.5 / r0, 3000, 4);
  const double sep = (blue.infidelity - red.infidelity) /
                     std::hypot(blue.infidelity_se, red.infidelity_se);
  CHECK(sep > 5);
  CHECK(blue.leakage > 0);
}

TEST_CASE("joint ensembles are reproducible") {
  const double gamma = 1e8, g = 3e-3 * gamma, pulse = 1.5 / (4 * g * g / gamma);
  for (Detuning v : {Detuning::Red, Detuning::Blue}) {
    JointHeraldOptions serial, parallel;
    serial.execution = Execution::Serial;
    const auto a = herald_joint_pair({g, gamma, 0.7}, {g, gamma, 0.7}, v, pulse, 3000, 99, serial);
    const auto b = herald_joint_pair({g, gamma, 0.7}, {g, gamma, 0.7}, v, pulse, 3000, 99, parallel);
    const auto c = herald_joint_pair({g, gamma, 0.7}, {g, gamma, 0.7}, v, pulse, 3000, 99, parallel);
    CHECK(a.rho.matrix() == b.rho.matrix());
    CHECK(b.rho.matrix() == c.rho.matrix());
    CHECK(a.infidelity == b.infidelity);
    CHECK(a.heralds == b.heralds);
    CHECK(a.lost == b.lost);
    CHECK(a.to_record() == c.to_record());
    CHECK(a.lost > 0);
  }
}

TEST_CASE("production ensemble agrees with the serial reference") {
  // Short pulse and few trials: the reference steps at 1e-2 / gamma.
  const double gamma = 1e8, g = 3e-2 * gamma, pulse = 0.5 / (4 * g * g / gamma);
  for (Detuning v : {Detuning::Red, Detuning::Blue}) {
    const FockCutoffs c = default_cutoffs(v);
    JointHeraldOptions o;
    o.cutoffs = c;
    const auto fast = herald_joint_pair({g, gamma, 0.8}, {g, gamma, 0.8}, v, pulse, 200, 6, o);
    const auto slow =
        reference::herald_joint_pair({g, gamma, 0.8}, {g, gamma, 0.8}, v, pulse, 200, 6, fast.cutoffs);
    if (v == Detuning::Red) CHECK(fast.cutoffs == c);
    CHECK(std::abs(static_cast<long>(fast.heralds) - static_cast<long>(slow.heralds)) <= 2);
    CHECK(fast.lost == slow.lost);
    CHECK(fast.infidelity == doctest::Approx(slow.infidelity).epsilon(0.02));
  }
}

TEST_CASE("cutoff saturation raises the truncation") {
  const double gamma = 1e8, g = 0.1 * gamma, pulse = 1.0 / (4 * g * g / gamma);
  JointHeraldOptions o;
  o.cutoffs = FockCutoffs{1, 1};
  const auto res = herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Blue, pulse, 200, 2, o);
  CHECK(res.cutoffs.optical > 1);
  o.max_cutoff = 2;
  CHECK_THROWS_AS(herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Blue, pulse, 200, 2, o),
                  TrajectoryError);
}

TEST_CASE("coincidence gate discards double clicks") {
  const double gamma = 1e8, g = 3e-2 * gamma, pulse = 1.5 / (4 * g * g / gamma);
  const auto closed = herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Blue, pulse, 3000, 1);
  JointHeraldOptions o;
  o.coincidence_window = 50 / gamma;
  const auto open = herald_joint_pair({g, gamma}, {g, gamma}, Detuning::Blue, pulse, 3000, 1, o);
  CHECK(closed.double_clicks == 0);
  CHECK(open.double_clicks > 0);
  CHECK(open.infidelity < closed.infidelity);
}

TEST_CASE("infidelity scaling fit") {
  const std::vector<double> ratios{1e-3, 3e-3, 1e-2, 3e-2};
  SUBCASE("red infidelity falls with the coupling ratio") {
    const auto fit = measure_infidelity_scaling(Detuning::Red, ratios, 2000, 3);
    for (std::size_t i = 1; i < fit.points.size(); ++i)
      CHECK(fit.points[i].infidelity > fit.points[i - 1].infidelity);
    CHECK_FALSE(fit.residual_flag);
  }
  SUBCASE("blue exponent lies between one and two") {
    const auto fit = measure_infidelity_scaling(Detuning::Blue, ratios, 2000, 3);
    CHECK(fit.exponent >= 1);
    CHECK(fit.exponent <= 2 + 3 * fit.exponent_se);
    CHECK(fit.prefactor == doctest::Approx(CalibrationRecord::builtin().blue.prefactor).epsilon(0.1));
  }
  SUBCASE("doubling the trials halves the variance of the prefactor") {
    // se^2 ~ 1 / trials. The spread of the ratio over independent seeds sets
    // the tolerance.
    std::vector<double> q;
    for (std::uint64_t s = 0; s < 8; ++s) {
      const auto one = measure_infidelity_scaling(Detuning::Blue, ratios, 1000, 100 + s);
      const auto two = measure_infidelity_scaling(Detuning::Blue, ratios, 2000, 200 + s);
      q.push_back(std::pow(two.prefactor_se / one.prefactor_se, 2));
    }
    double mean = 0, var = 0;
    for (double x : q) mean += x;
    mean /= q.size();
    for (double x : q) var += (x - mean) * (x - mean);
    var /= q.size() - 1;
    const double sigma = std::sqrt(var / q.size());
    MESSAGE("variance ratio " << mean << " +/- " << sigma);
    CHECK(std::abs(mean - 0.5) <= 3 * sigma);
  }
  CHECK_THROWS_AS(measure_infidelity_scaling(Detuning::Red, std::vector<double>{1e-3}, 10, 1),
                  std::invalid_argument);
}
