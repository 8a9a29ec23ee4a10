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

#include <Eigen/Dense>

#include <string_view>

namespace hent {

/// Two-qubit Bell states over the microwave basis {|00>, |01>, |10>, |11>}.
enum class BellState { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

std::string_view to_string(BellState s);
Eigen::Vector4cd bell_vector(BellState s);

/// Numerical health of a candidate two-qubit density matrix.
struct DensityDiagnostics {
  double hermiticity_error = 0;  // max |rho - rho^dagger|
  double trace_error = 0;        // |Tr rho - 1|
  double min_eigenvalue = 0;
};

DensityDiagnostics diagnose(const Eigen::Matrix4cd& rho);

/// Hermitian, unit-trace, positive semidefinite 4x4 matrix on the two
/// heralded microwave qubits. Construction validates the invariants.
class BellPairDensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-10;

  /// Throws std::invalid_argument if `rho` violates an invariant.
  explicit BellPairDensityMatrix(const Eigen::Matrix4cd& rho);

  /// Hermitizes and rescales to unit trace before validating. Intended for
  /// accumulated ensemble sums, whose trace is a count.
  static BellPairDensityMatrix from_unnormalized(const Eigen::Matrix4cd& sum);

  static BellPairDensityMatrix pure(BellState s);
  static BellPairDensityMatrix maximally_mixed();

  const Eigen::Matrix4cd& matrix() const { return rho_; }
  std::complex<double> operator()(int i, int j) const { return rho_(i, j); }

 private:
  Eigen::Matrix4cd rho_;
};

/// <Phi|rho|Phi>.
double fidelity_to_bell(const BellPairDensityMatrix& rho, BellState target);
/// Same, for a raw matrix; rejects matrices whose trace is not 1.
double fidelity_to_bell(const Eigen::Matrix4cd& rho, BellState target);

}  // namespace hent
