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

#include "hent/reference.hpp"

#include <cmath>

namespace hent::reference {

double default_step(const EffectiveGenerator& gen) {
  const double rate = std::max({gen.gamma_e, gen.g, 1.0});
  return 1e-2 / rate;
}

Eigen::VectorXcd integrate(const EffectiveGenerator& gen, const Eigen::VectorXcd& psi0, double t,
                           double step) {
  const Eigen::MatrixXcd& m = gen.matrix;
  Eigen::VectorXcd psi = psi0;
  double now = 0;
  while (now < t) {
    const double h = std::min(step, t - now);
    const Eigen::VectorXcd k1 = m * psi;
    const Eigen::VectorXcd k2 = m * (psi + 0.5 * h * k1);
    const Eigen::VectorXcd k3 = m * (psi + 0.5 * h * k2);
    const Eigen::VectorXcd k4 = m * (psi + h * k3);
    psi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    now += h;
  }
  return psi;
}

std::optional<double> first_click_time(const EffectiveGenerator& left,
                                       const EffectiveGenerator& right,
                                       const Eigen::VectorXcd& initial, double duration,
                                       double threshold) {
  const double step = std::min(default_step(left), default_step(right));
  Eigen::VectorXcd l = initial, r = initial;
  double now = 0;
  while (now < duration) {
    const double h = std::min(step, duration - now);
    const Eigen::VectorXcd l_next = integrate(left, l, h, h);
    const Eigen::VectorXcd r_next = integrate(right, r, h, h);
    if (l_next.squaredNorm() * r_next.squaredNorm() <= threshold) {
      double lo = 0, hi = h;
      while (hi - lo > 1e-3 * (now + lo)) {
        const double mid = 0.5 * (lo + hi);
        const double n = integrate(left, l, mid, mid).squaredNorm() *
                         integrate(right, r, mid, mid).squaredNorm();
        (n > threshold ? lo : hi) = mid;
      }
      return now + 0.5 * (lo + hi);
    }
    l = l_next;
    r = r_next;
    now += h;
  }
  return std::nullopt;
}

JointEnsembleResult herald_joint_pair(NodeDrive left, NodeDrive right, Detuning variant,
                                      double pulse, std::size_t trials, std::uint64_t seed,
                                      FockCutoffs cutoffs) {
  const EffectiveGenerator gl = build_effective_generator(variant, left.g, left.gamma, cutoffs);
  const EffectiveGenerator gr = build_effective_generator(variant, right.g, right.gamma, cutoffs);
  const Eigen::VectorXcd init = initial_state(variant, cutoffs).amplitudes();
  const int nb = cutoffs.microwave + 1, d = cutoffs.dimension();

  JointEnsembleResult res;
  res.variant = variant;
  res.left = left;
  res.right = right;
  res.pulse = pulse;
  res.trials = trials;
  res.seed = seed;
  res.cutoffs = cutoffs;
  Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
  double sum_eps = 0, sum_eps2 = 0, sum_leak = 0;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    StreamRng rng(seed, trial);
    const auto t = first_click_time(gl, gr, init, pulse, rng.uniform_open_zero());
    if (!t) {
      ++res.no_clicks;
      continue;
    }
    Eigen::VectorXcd l = integrate(gl, init, *t, default_step(gl));
    Eigen::VectorXcd r = integrate(gr, init, *t, default_step(gr));
    l.normalize();
    r.normalize();
    if (left.efficiency < 1 || right.efficiency < 1) {
      const double el = (gl.annihilate_optical * l).squaredNorm();
      const double er = (gr.annihilate_optical * r).squaredNorm();
      if (rng.uniform() >= (left.efficiency * el + right.efficiency * er) / (el + er)) {
        ++res.lost;
        continue;
      }
    }
    const Eigen::VectorXcd plus = joint_post_click_state(l, r, gl, Detector::Plus);
    const Eigen::VectorXcd minus = joint_post_click_state(l, r, gl, Detector::Minus);
    const double pp = plus.squaredNorm(), pm = minus.squaredNorm();
    const bool is_plus = rng.uniform() * (pp + pm) < pp;
    const Eigen::VectorXcd phi = (is_plus ? plus : minus).normalized();

    // Trace out both optical modes.
    Eigen::MatrixXcd mw = Eigen::MatrixXcd::Zero(nb * nb, nb * nb);
    for (int la = 0; la <= cutoffs.optical; ++la)
      for (int ra = 0; ra <= cutoffs.optical; ++ra) {
        Eigen::VectorXcd block(nb * nb);
        for (int lb = 0; lb < nb; ++lb)
          for (int rb = 0; rb < nb; ++rb) block(lb * nb + rb) = phi((la * nb + lb) * d + ra * nb + rb);
        mw += block * block.adjoint();
      }
    Eigen::Matrix4cd q;
    const int qi[4] = {0, 1, nb, nb + 1};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) q(i, j) = mw(qi[i], qi[j]);
    const double leak = 1.0 - q.trace().real();
    q += leak * 0.25 * Eigen::Matrix4cd::Identity();
    if (!is_plus) {
      const Eigen::Vector4cd z(1.0, 1.0, -1.0, -1.0);
      q = z.asDiagonal() * q * z.asDiagonal();
    }
    const double eps = 1.0 - fidelity_to_bell(q, BellState::PsiPlus);
    ++res.heralds;
    (is_plus ? res.plus_heralds : res.minus_heralds)++;
    sum += q;
    sum_eps += eps;
    sum_eps2 += eps * eps;
    sum_leak += leak;
  }
  if (res.heralds > 0) {
    const double n = static_cast<double>(res.heralds);
    res.rho = BellPairDensityMatrix::from_unnormalized(sum);
    res.infidelity = sum_eps / n;
    res.leakage = sum_leak / n;
    if (res.heralds > 1)
      res.infidelity_se =
          std::sqrt(std::max(0.0, (sum_eps2 - n * res.infidelity * res.infidelity) / (n - 1)) / n);
  }
  return res;
}

}  // namespace hent::reference
