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
#include "hent/model.hpp"
#include "hent/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hent {

class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Highest Fock level kept for the optical mode a and microwave mode b.
struct FockCutoffs {
  int optical = 3;
  int microwave = 3;

  int dimension() const { return (optical + 1) * (microwave + 1); }
  friend bool operator==(const FockCutoffs&, const FockCutoffs&) = default;
};

/// N_a = N_b = 3 for blue; the red protocol conserves excitation number, so
/// one level per mode is exact for a node prepared in |0 1>.
FockCutoffs default_cutoffs(Detuning variant);

/// Amplitudes over |n_a n_b> with flat index n_a * (N_b + 1) + n_b.
class TruncatedTwoModeState {
 public:
  explicit TruncatedTwoModeState(FockCutoffs cutoffs);
  static TruncatedTwoModeState basis(FockCutoffs cutoffs, int n_a, int n_b);

  const FockCutoffs& cutoffs() const { return cutoffs_; }
  int dimension() const { return cutoffs_.dimension(); }
  int index(int n_a, int n_b) const;
  std::pair<int, int> levels(int index) const;

  Eigen::VectorXcd& amplitudes() { return amps_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  std::complex<double> operator()(int n_a, int n_b) const { return amps_(index(n_a, n_b)); }
  double norm_squared() const { return amps_.squaredNorm(); }

 private:
  FockCutoffs cutoffs_;
  Eigen::VectorXcd amps_;
};

/// Vacuum for blue, microwave prepared in |1> for red.
TruncatedTwoModeState initial_state(Detuning variant, FockCutoffs cutoffs);

/// d psi / dt = matrix * psi for the no-click evolution:
///   blue: -i g (a b + a^dag b^dag) - (gamma_e / 2) a^dag a
///   red:  -i g (a^dag b + a b^dag) - (gamma_e / 2) a^dag a
struct EffectiveGenerator {
  Detuning variant = Detuning::Blue;
  double g = 0;
  double gamma_e = 0;
  FockCutoffs cutoffs;
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd annihilate_optical;
};

/// Throws std::invalid_argument for cutoffs below one level per mode or
/// negative rates.
EffectiveGenerator build_effective_generator(Detuning variant, double g, double gamma_e,
                                             FockCutoffs cutoffs);

/// Deterministic no-click (unnormalized) evolution psi(t) = exp(G t) psi(0) on
/// [0, horizon]. Shared read-only by every trial of an ensemble.
class NoJumpPath {
 public:
  NoJumpPath(const EffectiveGenerator& gen, const Eigen::VectorXcd& initial, double horizon);

  double horizon() const { return horizon_; }
  Eigen::VectorXcd state(double t) const;
  double norm_squared(double t) const;
  /// d/dt ln ||psi(t)||^2 at the (full-space) state psi.
  double log_norm_rate(const Eigen::VectorXcd& psi) const;
  /// True if the closed eigen-decomposition is used instead of checkpoints.
  bool uses_spectral_form() const { return spectral_; }

  /// Basis states reachable from the initial state; evolution is carried out
  /// on this invariant subspace only.
  const std::vector<int>& support() const { return support_; }
  Eigen::VectorXcd restricted_state(double t) const;
  double log_norm_rate_restricted(const Eigen::VectorXcd& psi) const;

  /// Checkpoint grid used to bracket threshold crossings.
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& norms() const { return norms_; }

 private:
  Eigen::MatrixXcd gen_;
  std::vector<int> support_;
  int full_dim_ = 0;
  double horizon_;
  bool spectral_ = false;
  // spectral form
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
  Eigen::VectorXcd weights_;
  // checkpoint form
  std::vector<Eigen::VectorXcd> states_;
  std::vector<double> times_;
  std::vector<double> norms_;
};

/// First time at which prod_k ||psi_k(t)||^2 falls to `threshold`, or empty if
/// it stays above it up to the common horizon. `paths` must share a horizon.
std::optional<double> first_click_time(std::span<const NoJumpPath* const> paths,
                                       double threshold);

enum class Detector { Plus, Minus };

struct HeraldRecord {
  bool clicked = false;
  double click_time = 0;
  Detector which_detector = Detector::Plus;
  /// Microwave density matrix after the click, unit trace. One node: levels
  /// 0..N_b. Two nodes: index n_b_left * (N_b + 1) + n_b_right.
  Eigen::MatrixXcd post_click_state;
  /// Population above 1e-6 on the highest kept Fock level.
  bool cutoff_saturated = false;
};

inline constexpr double kSaturationThreshold = 1e-6;

/// One quantum-jump trajectory of a single node with collapse sqrt(gamma_e) a.
/// Only the first click is recorded; the pulse ends there.
HeraldRecord simulate_trajectory(const TruncatedTwoModeState& initial,
                                 const EffectiveGenerator& gen, double duration,
                                 std::uint64_t seed, std::uint64_t stream = 0);

/// Click times of `trials` single-node trajectories (trial order, clicked
/// trials only) plus the number that never clicked within `duration`.
struct ClickTimeSample {
  std::vector<double> click_times;
  std::size_t no_clicks = 0;
};
ClickTimeSample click_time_ensemble(const TruncatedTwoModeState& initial,
                                    const EffectiveGenerator& gen, double duration,
                                    std::size_t trials, std::uint64_t seed,
                                    Execution exec = Execution::Parallel);

/// Drive of one node: effective coupling and total decay of the heralding mode.
struct NodeDrive {
  double g = 0;
  double gamma = 0;
  /// Probability that a photon emitted by this node is detected. A missed
  /// photon ends the attempt without a herald.
  double efficiency = 1;
  friend bool operator==(const NodeDrive&, const NodeDrive&) = default;
};

/// g = g0 sqrt(n_p(P)), gamma = ge_sig + gi_sig, efficiency = ge_sig / gamma
/// times the detector efficiency. Intrinsic loss broadens the cavity like
/// extrinsic loss; photons it removes are never detected.
NodeDrive node_drive(const TransducerParams& p, double pump_power);

struct JointHeraldOptions {
  /// Empty: default_cutoffs(variant).
  std::optional<FockCutoffs> cutoffs;
  /// Highest cutoff tried when the saturation monitor fires.
  int max_cutoff = 10;
  /// Detector gate kept open after a herald. Residual photons escaping within
  /// the window produce a second click and the trial is discarded. Zero
  /// means the detectors close on the first click.
  double coincidence_window = 0;
  /// Reset dead-time used for the empirical rate.
  double t_reset = 0;
  Execution execution = Execution::Parallel;
};

/// Post-click two-node state for a click at `click_time` in `detector`,
/// expressed on the joint Fock space of both nodes (left index major).
Eigen::VectorXcd joint_post_click_state(const Eigen::VectorXcd& left, const Eigen::VectorXcd& right,
                                        const EffectiveGenerator& gen_left, Detector detector);

struct JointEnsembleResult {
  Detuning variant = Detuning::Red;
  NodeDrive left, right;
  double pulse = 0;
  double t_reset = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  FockCutoffs cutoffs;

  /// Heralded microwave pair, reported in the Plus frame.
  BellPairDensityMatrix rho = BellPairDensityMatrix::maximally_mixed();
  std::size_t heralds = 0;
  std::size_t plus_heralds = 0;
  std::size_t minus_heralds = 0;
  std::size_t no_clicks = 0;
  std::size_t double_clicks = 0;
  std::size_t lost = 0;  // first photon emitted but not detected

  double infidelity = 0;     // 1 - <Psi+|rho|Psi+>
  double infidelity_se = 0;  // standard error over heralds
  double leakage = 0;        // mean weight outside the qubit subspace

  double herald_probability() const;
  double herald_probability_se() const;
  double empirical_rate() const;
  double empirical_rate_se() const;
  double fidelity() const { return 1.0 - infidelity; }

  /// Key-value export: parameters, counts, rate and the 16 entries of rho.
  std::string to_record() const;
};

/// Both nodes pumped for `pulse`; their optical outputs interfere on a
/// balanced beamsplitter with detectors at (a_l +/- a_r)/sqrt(2). Trials with
/// exactly one click contribute their conditional microwave state; Minus
/// heralds receive a phase flip on the left qubit.
JointEnsembleResult herald_joint_pair(NodeDrive left, NodeDrive right, Detuning variant,
                                      double pulse, std::size_t trials, std::uint64_t seed,
                                      const JointHeraldOptions& options = {});

/// Same, from node parameters at a shared pump power.
JointEnsembleResult herald_joint_pair(const TransducerParams& left, const TransducerParams& right,
                                      double pump_power, Detuning variant, double pulse,
                                      std::size_t trials, std::uint64_t seed,
                                      JointHeraldOptions options = {});

struct ScalingPoint {
  double ratio = 0;
  double infidelity = 0;
  double infidelity_se = 0;
  std::size_t heralds = 0;
};

struct ScalingOptions {
  double gamma = 1e8;
  /// Pulse = pulse_factor / (2 r0): most trials herald.
  double pulse_factor = 3.0;
  /// RMS log residual above which the fit is flagged.
  double residual_threshold = 0.1;
  Execution execution = Execution::Parallel;
};

struct ScalingFit {
  Detuning variant = Detuning::Red;
  std::vector<ScalingPoint> points;
  double exponent = 0;
  double exponent_se = 0;
  double prefactor = 0;
  double prefactor_se = 0;
  double residual = 0;
  bool residual_flag = false;
};

/// Heralded infidelity on a list of g / gamma ratios, then a log-log least
/// squares fit eps = prefactor * ratio^exponent. Standard errors propagate
/// the per-ratio Monte Carlo errors.
ScalingFit measure_infidelity_scaling(Detuning variant, std::span<const double> ratios,
                                      std::size_t trials, std::uint64_t seed,
                                      const ScalingOptions& options = {});

}  // namespace hent
