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

#include "hent/entanglement.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace hent {

namespace {

using Matrix16c = Eigen::Matrix<std::complex<double>, 16, 16>;

// Qubit q0 is the most significant bit of a 16-dim index. Ordering of the
// joint register is (kept-left, kept-right, sac-left, sac-right).
constexpr int bit_of(int qubit) { return 3 - qubit; }

Matrix16c cnot(int control, int target) {
  Matrix16c u = Matrix16c::Zero();
  for (int x = 0; x < 16; ++x) {
    const int y = ((x >> bit_of(control)) & 1) ? (x ^ (1 << bit_of(target))) : x;
    u(y, x) = 1.0;
  }
  return u;
}

Eigen::Matrix2cd pauli(int k) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, C(0, -1), C(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Single-qubit operator embedded at `qubit` of the 4-qubit register.
Matrix16c embed(const Eigen::Matrix2cd& op, int qubit) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < 4; ++q) {
    const Eigen::MatrixXcd factor = (q == qubit) ? Eigen::MatrixXcd(op)
                                                 : Eigen::MatrixXcd::Identity(2, 2);
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

// Two-qubit Pauli twirl: (1/16) sum_{P,Q} (P_a Q_b) rho (P_a Q_b)^dagger,
// which replaces qubits a and b with the maximally mixed state.
Matrix16c depolarize_pair(const Matrix16c& rho, int a, int b) {
  Matrix16c out = Matrix16c::Zero();
  for (int i = 0; i < 4; ++i) {
    const Matrix16c pa = embed(pauli(i), a);
    for (int j = 0; j < 4; ++j) {
      const Matrix16c k = pa * embed(pauli(j), b);
      out.noalias() += k * rho * k.adjoint();
    }
  }
  return out / 16.0;
}

Matrix16c noisy_cnot(const Matrix16c& rho, int control, int target, double p) {
  const Matrix16c u = cnot(control, target);
  const Matrix16c ideal = u * rho * u.adjoint();
  if (p >= 1.0) return ideal;
  return p * ideal + (1.0 - p) * depolarize_pair(ideal, control, target);
}

}  // namespace

HeraldedMixture mixture_state(double epsilon, HeraldSign sign) {
  if (!(epsilon >= 0.0 && epsilon <= kMaxMixtureInfidelity))
    throw std::invalid_argument("mixture infidelity must lie in [0, 2/3]");
  const Eigen::Vector4cd a =
      bell_vector(sign == HeraldSign::Plus ? BellState::PsiPlus : BellState::PsiMinus);
  const Eigen::Vector4cd b = bell_vector(BellState::PhiPlus);
  const Eigen::Vector4cd c = bell_vector(BellState::PhiMinus);
  const Eigen::Matrix4cd rho = (1.0 - epsilon) * a * a.adjoint() +
                               0.5 * epsilon * (b * b.adjoint() + c * c.adjoint());
  return HeraldedMixture{epsilon, sign, BellPairDensityMatrix(rho)};
}

double gate_depolarizing_weight(double gate_fidelity) {
  if (!(gate_fidelity >= 0.0 && gate_fidelity <= 1.0))
    throw std::invalid_argument("gate fidelity must lie in [0, 1]");
  // Average fidelity of p * U + (1 - p) * depolarize on two qubits is
  // p + (1 - p) / 4. The (16 F - 1) / 15 form inverts the process fidelity.
  return std::clamp((4.0 * gate_fidelity - 1.0) / 3.0, 0.0, 1.0);
}

PurificationOutcome purify(const BellPairDensityMatrix& kept,
                           const BellPairDensityMatrix& sacrificial, double gate_fidelity,
                           BellState target) {
  const double p = gate_depolarizing_weight(gate_fidelity);
  Matrix16c rho = Eigen::kroneckerProduct(kept.matrix(), sacrificial.matrix());
  rho = noisy_cnot(rho, 0, 2, p);
  rho = noisy_cnot(rho, 1, 3, p);

  // Keep sacrificial outcomes 00 and 11, trace them out.
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int m : {0b00, 0b11}) out(i, j) += rho((i << 2) | m, (j << 2) | m);

  PurificationOutcome result;
  const double accept = out.trace().real();
  result.success_probability = std::clamp(accept, 0.0, 1.0);
  if (accept <= 0.0) return result;
  result.output_state = BellPairDensityMatrix::from_unnormalized(out);
  result.output_fidelity = fidelity_to_bell(result.output_state, target);
  return result;
}

double hashing_yield(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("infidelity must lie in [0, 1]");
  auto plogp = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
  const double entropy = -plogp(1.0 - epsilon) - 2.0 * plogp(0.5 * epsilon);
  return std::max(0.0, 1.0 - entropy);
}

double ebit_rate(double r_e, double epsilon, bool purified, double gate_fidelity) {
  if (!purified) return r_e * hashing_yield(epsilon);
  const double eps = std::min(epsilon, kMaxMixtureInfidelity);
  const auto pair = mixture_state(eps).rho;
  const PurificationOutcome out = purify(pair, pair, gate_fidelity);
  const double eps_out = std::clamp(1.0 - out.output_fidelity, 0.0, 1.0);
  return 0.5 * r_e * out.success_probability * hashing_yield(eps_out);
}

}  // namespace hent
