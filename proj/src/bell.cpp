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

#include "hent/bell.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hent {

std::string_view to_string(BellState s) {
  switch (s) {
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
  }
  return "?";
}

Eigen::Vector4cd bell_vector(BellState s) {
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (s) {
    case BellState::PsiPlus: v(1) = h; v(2) = h; break;
    case BellState::PsiMinus: v(1) = h; v(2) = -h; break;
    case BellState::PhiPlus: v(0) = h; v(3) = h; break;
    case BellState::PhiMinus: v(0) = h; v(3) = -h; break;
  }
  return v;
}

DensityDiagnostics diagnose(const Eigen::Matrix4cd& rho) {
  DensityDiagnostics d;
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho.trace() - 1.0);
  const Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

BellPairDensityMatrix::BellPairDensityMatrix(const Eigen::Matrix4cd& rho) : rho_(rho) {
  const DensityDiagnostics d = diagnose(rho_);
  if (d.hermiticity_error > kHermiticityTol || d.trace_error > kTraceTol ||
      d.min_eigenvalue < -kPositivityTol) {
    std::ostringstream msg;
    msg << "not a valid density matrix (hermiticity " << d.hermiticity_error << ", trace error "
        << d.trace_error << ", min eigenvalue " << d.min_eigenvalue << ")";
    throw std::invalid_argument(msg.str());
  }
}

BellPairDensityMatrix BellPairDensityMatrix::from_unnormalized(const Eigen::Matrix4cd& sum) {
  const double tr = sum.trace().real();
  if (!(tr > 0)) throw std::invalid_argument("cannot normalize a matrix with non-positive trace");
  const Eigen::Matrix4cd herm = 0.5 * (sum + sum.adjoint()) / tr;
  return BellPairDensityMatrix(herm);
}

BellPairDensityMatrix BellPairDensityMatrix::pure(BellState s) {
  const Eigen::Vector4cd v = bell_vector(s);
  return BellPairDensityMatrix(v * v.adjoint());
}

BellPairDensityMatrix BellPairDensityMatrix::maximally_mixed() {
  return BellPairDensityMatrix(Eigen::Matrix4cd::Identity() * 0.25);
}

double fidelity_to_bell(const BellPairDensityMatrix& rho, BellState target) {
  const Eigen::Vector4cd v = bell_vector(target);
  const double f = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity_to_bell(const Eigen::Matrix4cd& rho, BellState target) {
  if (std::abs(rho.trace() - 1.0) > BellPairDensityMatrix::kTraceTol)
    throw std::invalid_argument("density matrix is not normalized");
  return fidelity_to_bell(BellPairDensityMatrix(rho), target);
}

}  // namespace hent
