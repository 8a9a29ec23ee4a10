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

#include "hent/bell.hpp"

#include <Eigen/Dense>

namespace hent {

enum class HeraldSign { Plus, Minus };

/// Heralded pair with infidelity epsilon: weight 1-eps on the desired
/// |01> +/- |10> state and eps/2 on each of |00> + |11> and |00> - |11>.
struct HeraldedMixture {
  double epsilon = 0;
  HeraldSign sign = HeraldSign::Plus;
  BellPairDensityMatrix rho = BellPairDensityMatrix::pure(BellState::PsiPlus);
};

inline constexpr double kMaxMixtureInfidelity = 2.0 / 3.0;

/// Throws std::invalid_argument unless 0 <= epsilon <= 2/3.
HeraldedMixture mixture_state(double epsilon, HeraldSign sign = HeraldSign::Plus);

struct PurificationOutcome {
  double success_probability = 0;
  BellPairDensityMatrix output_state = BellPairDensityMatrix::maximally_mixed();
  double output_fidelity = 0;
};

/// Depolarizing weight of a two-qubit gate with average gate fidelity F:
/// p = (4 F - 1) / 3, clamped to [0, 1].
double gate_depolarizing_weight(double gate_fidelity);

/// One round of recurrence purification. `kept` and `sacrificial` are the
/// two heralded pairs (left qubit, right qubit). Each node applies a CNOT
/// from its kept qubit onto its sacrificial qubit; each CNOT is ideal with
/// probability p and fully depolarizes its two qubits otherwise. The
/// sacrificial qubits are measured in Z and the round succeeds when the two
/// outcomes agree. Fidelity is reported against `target`.
///
/// When the acceptance probability is exactly zero the output state is
/// maximally mixed.
PurificationOutcome purify(const BellPairDensityMatrix& kept,
                           const BellPairDensityMatrix& sacrificial,
                           double gate_fidelity,
                           BellState target = BellState::PsiPlus);

/// Distillable ebits per pair by hashing: 1 - S(rho) for the normalized
/// mixture, base-2 entropy, clamped below at zero.
double hashing_yield(double epsilon);

/// Equivalent ebit rate. Unpurified: r_e * yield(eps). Purified: half the
/// pair rate times the success probability times yield of the output.
double ebit_rate(double r_e, double epsilon, bool purified, double gate_fidelity);

}  // namespace hent
