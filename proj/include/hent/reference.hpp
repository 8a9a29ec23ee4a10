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

// Straightforward serial implementations kept as cross-checks for the
// production kernels: fixed-step RK4 integration, bisection on the click
// threshold and dense two-node algebra.

#include "hent/trajectory.hpp"

namespace hent::reference {

/// RK4 step no larger than 1e-2 / gamma_e.
double default_step(const EffectiveGenerator& gen);

/// psi(t) from psi(0) by fixed-step RK4 with the last step shortened to land on t.
Eigen::VectorXcd integrate(const EffectiveGenerator& gen, const Eigen::VectorXcd& psi0, double t,
                           double step);

/// First time prod ||psi_k||^2 reaches `threshold`, bracketed on the RK4 grid
/// and bisected to 1e-3 relative. Both nodes start in `initial`.
std::optional<double> first_click_time(const EffectiveGenerator& left,
                                       const EffectiveGenerator& right,
                                       const Eigen::VectorXcd& initial, double duration,
                                       double threshold);

/// Serial joint-herald ensemble consuming the same random streams as
/// hent::herald_joint_pair at fixed cutoffs and a closed detector gate.
JointEnsembleResult herald_joint_pair(NodeDrive left, NodeDrive right, Detuning variant,
                                      double pulse, std::size_t trials, std::uint64_t seed,
                                      FockCutoffs cutoffs);

}  // namespace hent::reference
