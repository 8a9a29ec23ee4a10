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

#include "hent/trajectory.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "text_util.hpp"

namespace hent {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};
constexpr int kCheckpoints = 256;

Eigen::MatrixXcd annihilation(int cutoff) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Indices reachable from the support of `v` through nonzero entries of `m`.
std::vector<int> reachable_support(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i)
    if (v(i) != cd(0)) {
      seen[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (int i = 0; i < n; ++i)
      if (!seen[i] && m(i, j) != cd(0)) {
        seen[i] = 1;
        stack.push_back(i);
      }
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

bool top_level_populated(const Eigen::VectorXcd& psi, FockCutoffs c) {
  const double total = psi.squaredNorm();
  double top = 0;
  for (int na = 0; na <= c.optical; ++na)
    for (int nb = 0; nb <= c.microwave; ++nb)
      if (na == c.optical || nb == c.microwave) top += std::norm(psi(na * (c.microwave + 1) + nb));
  return top > kSaturationThreshold * total;
}

}  // namespace

FockCutoffs default_cutoffs(Detuning variant) {
  return variant == Detuning::Blue ? FockCutoffs{3, 3} : FockCutoffs{1, 1};
}

TruncatedTwoModeState::TruncatedTwoModeState(FockCutoffs cutoffs) : cutoffs_(cutoffs) {
  if (cutoffs.optical < 0 || cutoffs.microwave < 0)
    throw std::invalid_argument("Fock cutoffs must be >= 0");
  amps_ = Eigen::VectorXcd::Zero(cutoffs.dimension());
}

TruncatedTwoModeState TruncatedTwoModeState::basis(FockCutoffs cutoffs, int n_a, int n_b) {
  TruncatedTwoModeState s(cutoffs);
  s.amps_(s.index(n_a, n_b)) = 1.0;
  return s;
}

int TruncatedTwoModeState::index(int n_a, int n_b) const {
  if (n_a < 0 || n_a > cutoffs_.optical || n_b < 0 || n_b > cutoffs_.microwave)
    throw std::out_of_range("Fock level outside the truncated space");
  return n_a * (cutoffs_.microwave + 1) + n_b;
}

std::pair<int, int> TruncatedTwoModeState::levels(int index) const {
  if (index < 0 || index >= dimension()) throw std::out_of_range("flat index out of range");
  return {index / (cutoffs_.microwave + 1), index % (cutoffs_.microwave + 1)};
}

TruncatedTwoModeState initial_state(Detuning variant, FockCutoffs cutoffs) {
  return TruncatedTwoModeState::basis(cutoffs, 0, variant == Detuning::Blue ? 0 : 1);
}

EffectiveGenerator build_effective_generator(Detuning variant, double g, double gamma_e,
                                             FockCutoffs cutoffs) {
  if (cutoffs.optical < 1 || cutoffs.microwave < 1)
    throw std::invalid_argument("both Fock cutoffs must be >= 1");
  if (!(g >= 0) || !(gamma_e >= 0)) throw std::invalid_argument("rates must be >= 0");

  const Eigen::MatrixXcd ia = Eigen::MatrixXcd::Identity(cutoffs.optical + 1, cutoffs.optical + 1);
  const Eigen::MatrixXcd ib =
      Eigen::MatrixXcd::Identity(cutoffs.microwave + 1, cutoffs.microwave + 1);
  const Eigen::MatrixXcd a = Eigen::kroneckerProduct(annihilation(cutoffs.optical), ib);
  const Eigen::MatrixXcd b = Eigen::kroneckerProduct(ia, annihilation(cutoffs.microwave));

  const Eigen::MatrixXcd pair =
      variant == Detuning::Blue ? Eigen::MatrixXcd(a * b) : Eigen::MatrixXcd(a.adjoint() * b);
  const Eigen::MatrixXcd coupling = pair + pair.adjoint();

  EffectiveGenerator gen;
  gen.variant = variant;
  gen.g = g;
  gen.gamma_e = gamma_e;
  gen.cutoffs = cutoffs;
  // Number operator from integers: a^dag a picks up rounding from sqrt(n)^2.
  Eigen::VectorXcd levels(cutoffs.dimension());
  for (int i = 0; i < cutoffs.dimension(); ++i) levels(i) = i / (cutoffs.microwave + 1);
  gen.matrix = -kI * g * coupling;
  gen.matrix.diagonal() -= 0.5 * gamma_e * levels;
  gen.annihilate_optical = a;
  return gen;
}

// --- NoJumpPath ------------------------------------------------------------

NoJumpPath::NoJumpPath(const EffectiveGenerator& gen, const Eigen::VectorXcd& initial,
                       double horizon)
    : horizon_(horizon) {
  if (!(horizon > 0)) throw std::invalid_argument("duration must be > 0");
  if (initial.size() != gen.matrix.rows())
    throw std::invalid_argument("initial state dimension does not match the generator");
  const double n0 = initial.norm();
  if (!(n0 > 0)) throw std::invalid_argument("initial state has zero norm");

  full_dim_ = static_cast<int>(initial.size());
  support_ = reachable_support(gen.matrix, initial);
  const int m = static_cast<int>(support_.size());
  gen_.resize(m, m);
  Eigen::VectorXcd psi0(m);
  for (int i = 0; i < m; ++i) {
    psi0(i) = initial(support_[i]) / n0;
    for (int j = 0; j < m; ++j) gen_(i, j) = gen.matrix(support_[i], support_[j]);
  }

  // Spectral form when the restricted generator is safely diagonalizable.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(gen_);
  if (es.info() == Eigen::Success) {
    const Eigen::MatrixXcd& v = es.eigenvectors();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
    if (lu.isInvertible()) {
      const Eigen::MatrixXcd vinv = lu.inverse();
      const double cond = v.norm() * vinv.norm();
      const double scale = std::max(gen_.norm(), std::numeric_limits<double>::min());
      const double recon =
          (v * es.eigenvalues().asDiagonal() * vinv - gen_).norm() / scale;
      if (cond < 1e6 && recon < 1e-11) {
        spectral_ = true;
        eigenvalues_ = es.eigenvalues();
        eigenvectors_ = v;
        weights_ = vinv * psi0;
      }
    }
  }

  const double h = horizon / kCheckpoints;
  if (!(h > 0) || horizon - h == horizon) throw TrajectoryError("step-size underflow");
  times_.resize(kCheckpoints + 1);
  norms_.resize(kCheckpoints + 1);
  states_.resize(kCheckpoints + 1);
  const Eigen::MatrixXcd step = spectral_ ? Eigen::MatrixXcd() : Eigen::MatrixXcd((gen_ * h).exp());
  states_[0] = psi0;
  for (int k = 0; k <= kCheckpoints; ++k) {
    times_[k] = (k == kCheckpoints) ? horizon : h * k;
    if (k > 0) states_[k] = spectral_ ? restricted_state(times_[k]) : Eigen::VectorXcd(step * states_[k - 1]);
    norms_[k] = states_[k].squaredNorm();
  }
}

Eigen::VectorXcd NoJumpPath::restricted_state(double t) const {
  if (spectral_) {
    Eigen::VectorXcd w = weights_;
    for (Eigen::Index j = 0; j < w.size(); ++j) w(j) *= std::exp(eigenvalues_(j) * t);
    return eigenvectors_ * w;
  }
  const double h = horizon_ / kCheckpoints;
  const int k = std::clamp(static_cast<int>(t / h), 0, kCheckpoints);
  const double tau = t - times_[k];
  if (tau == 0) return states_[k];
  return (gen_ * tau).exp() * states_[k];
}

Eigen::VectorXcd NoJumpPath::state(double t) const {
  if (t < 0) throw std::invalid_argument("time must be >= 0");
  const Eigen::VectorXcd r = restricted_state(t);
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(full_dim_);
  for (std::size_t i = 0; i < support_.size(); ++i) full(support_[i]) = r(i);
  return full;
}

double NoJumpPath::norm_squared(double t) const { return restricted_state(t).squaredNorm(); }

double NoJumpPath::log_norm_rate(const Eigen::VectorXcd& psi) const {
  if (psi.size() != full_dim_) throw std::invalid_argument("state dimension mismatch");
  Eigen::VectorXcd r(support_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) r(i) = psi(support_[i]);
  return log_norm_rate_restricted(r);
}

double NoJumpPath::log_norm_rate_restricted(const Eigen::VectorXcd& psi) const {
  return 2.0 * psi.dot(gen_ * psi).real() / psi.squaredNorm();
}

std::optional<double> first_click_time(std::span<const NoJumpPath* const> paths,
                                       double threshold) {
  if (paths.empty()) throw std::invalid_argument("no paths given");
  if (!(threshold > 0 && threshold <= 1)) throw std::invalid_argument("threshold must lie in (0, 1]");
  const auto& times = paths.front()->times();
  for (const auto* p : paths)
    if (p->times() != times) throw std::invalid_argument("paths must share a checkpoint grid");

  const auto joint_log_norm_at = [&](std::size_t k) {
    double s = 0;
    for (const auto* p : paths) s += std::log(p->norms()[k]);
    return s;
  };
  const double log_u = std::log(threshold);
  if (joint_log_norm_at(0) <= log_u) return 0.0;
  if (joint_log_norm_at(times.size() - 1) > log_u) return std::nullopt;

  // First checkpoint at or below the threshold (norm is non-increasing).
  std::size_t lo = 0, hi = times.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (joint_log_norm_at(mid) > log_u ? lo : hi) = mid;
  }

  double a = times[lo], b = times[hi];
  const double fa = joint_log_norm_at(lo) - log_u;
  const double fb = joint_log_norm_at(hi) - log_u;
  double x = std::isfinite(fb) ? a + (b - a) * fa / (fa - fb) : 0.5 * (a + b);
  if (!(x > a && x < b)) x = 0.5 * (a + b);

  std::vector<Eigen::VectorXcd> psi(paths.size());
  for (int it = 0; it < 200; ++it) {
    double f = -log_u, df = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      psi[i] = paths[i]->restricted_state(x);
      f += std::log(psi[i].squaredNorm());
      df += paths[i]->log_norm_rate_restricted(psi[i]);
    }
    if (f > 0) a = x; else b = x;
    if (std::abs(f) < 1e-14 || (b - a) <= 4 * std::numeric_limits<double>::epsilon() * b) break;
    double next = (df < 0) ? x - f / df : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    x = next;
  }
  return x;
}

// --- single node -----------------------------------------------------------

namespace {

Eigen::MatrixXcd microwave_reduced(const Eigen::VectorXcd& phi, FockCutoffs c) {
  const int nb = c.microwave + 1;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(nb, nb);
  for (int na = 0; na <= c.optical; ++na) {
    const auto block = phi.segment(na * nb, nb);
    rho.noalias() += block * block.adjoint();
  }
  return rho / rho.trace().real();
}

}  // namespace

HeraldRecord simulate_trajectory(const TruncatedTwoModeState& initial,
                                 const EffectiveGenerator& gen, double duration,
                                 std::uint64_t seed, std::uint64_t stream) {
  if (!(initial.cutoffs() == gen.cutoffs))
    throw std::invalid_argument("state and generator cutoffs differ");
  const NoJumpPath path(gen, initial.amplitudes(), duration);
  StreamRng rng(seed, stream);
  const NoJumpPath* paths[] = {&path};
  const auto t = first_click_time(paths, rng.uniform_open_zero());

  HeraldRecord rec;
  if (!t) return rec;
  rec.clicked = true;
  rec.click_time = *t;
  const Eigen::VectorXcd psi = path.state(*t);
  const Eigen::VectorXcd phi = gen.annihilate_optical * psi;
  rec.cutoff_saturated = gen.variant == Detuning::Blue &&
                         (top_level_populated(psi, gen.cutoffs) || top_level_populated(phi, gen.cutoffs));
  rec.post_click_state = microwave_reduced(phi, gen.cutoffs);
  return rec;
}

ClickTimeSample click_time_ensemble(const TruncatedTwoModeState& initial,
                                    const EffectiveGenerator& gen, double duration,
                                    std::size_t trials, std::uint64_t seed, Execution exec) {
  const NoJumpPath path(gen, initial.amplitudes(), duration);
  const NoJumpPath* paths[] = {&path};
  std::vector<double> times(trials, std::numeric_limits<double>::quiet_NaN());
  const auto n = static_cast<std::int64_t>(trials);

  auto one = [&](std::int64_t i) {
    StreamRng rng(seed, static_cast<std::uint64_t>(i));
    if (auto t = first_click_time(paths, rng.uniform_open_zero())) times[i] = *t;
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) one(i);
  }

  ClickTimeSample out;
  for (double t : times) {
    if (std::isnan(t)) ++out.no_clicks;
    else out.click_times.push_back(t);
  }
  return out;
}

// --- two nodes -------------------------------------------------------------

NodeDrive node_drive(const TransducerParams& p, double pump_power) {
  p.validate();
  return {effective_coupling(p.g0, pump_photon_number(p, pump_power)), p.gamma_sig(),
          p.herald_efficiency()};
}

Eigen::VectorXcd joint_post_click_state(const Eigen::VectorXcd& left, const Eigen::VectorXcd& right,
                                        const EffectiveGenerator& gen, Detector detector) {
  const Eigen::VectorXcd al = gen.annihilate_optical * left;
  const Eigen::VectorXcd ar = gen.annihilate_optical * right;
  const double sign = detector == Detector::Plus ? 1.0 : -1.0;
  const Eigen::VectorXcd out = Eigen::kroneckerProduct(al, right).eval() +
                               sign * Eigen::kroneckerProduct(left, ar).eval();
  return out / std::sqrt(2.0);
}

namespace {

enum class TrialKind : std::uint8_t { NoClick, Herald, DoubleClick, Lost };

struct TrialOutcome {
  TrialKind kind = TrialKind::NoClick;
  Detector detector = Detector::Plus;
  bool saturated = false;
  double infidelity = 0;
  double leakage = 0;
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
};

struct JointContext {
  Detuning variant;
  FockCutoffs cutoffs;
  EffectiveGenerator gen_left, gen_right;
  const NoJumpPath* left;
  const NoJumpPath* right;
  std::vector<double> pow_left, pow_right;  // keep^n for n optical photons
  bool gated;
  double eff_left = 1, eff_right = 1;
};

TrialOutcome run_joint_trial(const JointContext& ctx, std::uint64_t seed, std::uint64_t trial) {
  TrialOutcome out;
  StreamRng rng(seed, trial);
  const NoJumpPath* paths[] = {ctx.left, ctx.right};
  const auto t = first_click_time(paths, rng.uniform_open_zero());
  if (!t) return out;

  // The joint post-click state (a_l u_r +/- u_l a_r) / sqrt(2) is handled
  // through the nonzero entries of the single-node factors only.
  Eigen::VectorXcd ul = ctx.left->state(*t), ur = ctx.right->state(*t);
  ul.normalize();
  ur.normalize();
  const Eigen::VectorXcd vl = ctx.gen_left.annihilate_optical * ul;
  const Eigen::VectorXcd vr = ctx.gen_right.annihilate_optical * ur;
  const auto nonzero = [](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x(i) != cd(0) || y(i) != cd(0)) idx.push_back(static_cast<int>(i));
    return idx;
  };
  const std::vector<int> il = nonzero(ul, vl), ir = nonzero(ur, vr);

  if (ctx.eff_left < 1 || ctx.eff_right < 1) {
    const double el = vl.squaredNorm(), er = vr.squaredNorm();
    const double detected = (ctx.eff_left * el + ctx.eff_right * er) / (el + er);
    if (rng.uniform() >= detected) {
      out.kind = TrialKind::Lost;
      return out;
    }
  }

  const cd cross = vl.dot(ul) * ur.dot(vr);
  const double base = 0.5 * (vl.squaredNorm() + vr.squaredNorm());
  const double pp = base + cross.real(), pm = base - cross.real();
  out.detector = rng.uniform() * (pp + pm) < pp ? Detector::Plus : Detector::Minus;
  const double sign = out.detector == Detector::Plus ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(2.0 * (out.detector == Detector::Plus ? pp : pm));

  const FockCutoffs c = ctx.cutoffs;
  const int nb = c.microwave + 1, na = c.optical + 1;
  const bool blue = ctx.variant == Detuning::Blue;
  if (blue)
    out.saturated = top_level_populated(ul, c) || top_level_populated(ur, c);

  // Per optical sector (na_l, na_r): amplitudes on the four qubit levels.
  // Sector weight keep_l^na_l keep_r^na_r is the chance that residual photons
  // escape the detector gate unseen.
  std::vector<cd> qubit_amps(static_cast<std::size_t>(na * na * 4), cd(0));
  double kept = 0, total = 0, top = 0, outside = 0;
  for (int l : il)
    for (int r : ir) {
      const cd amp = scale * (vl(l) * ur(r) + sign * ul(l) * vr(r));
      const double p = std::norm(amp);
      if (p == 0) continue;
      const int la = l / nb, lb = l % nb, ra = r / nb, rb = r % nb;
      total += p;
      if (la == c.optical || lb == c.microwave || ra == c.optical || rb == c.microwave) top += p;
      const double w = ctx.pow_left[la] * ctx.pow_right[ra];
      kept += w * p;
      if (lb < 2 && rb < 2) qubit_amps[(la * na + ra) * 4 + lb * 2 + rb] = amp;
      else outside += w * p;
    }
  if (blue && top > kSaturationThreshold * total) out.saturated = true;

  if (ctx.gated && rng.uniform() >= kept) {
    out.kind = TrialKind::DoubleClick;
    return out;
  }

  Eigen::Matrix4cd q = Eigen::Matrix4cd::Zero();
  for (int la = 0; la < na; ++la)
    for (int ra = 0; ra < na; ++ra) {
      const double w = ctx.pow_left[la] * ctx.pow_right[ra];
      if (w == 0) continue;
      const Eigen::Map<const Eigen::Vector4cd> b(&qubit_amps[(la * na + ra) * 4]);
      q.noalias() += w * b * b.adjoint();
    }
  q /= kept;

  // Weight outside the qubit subspace is replaced by the maximally mixed
  // state. Summed explicitly so a red herald stays exactly inside.
  out.leakage = outside / kept;
  if (out.leakage > 0) q += out.leakage * 0.25 * Eigen::Matrix4cd::Identity();
  if (out.detector == Detector::Minus) {
    const Eigen::Vector4cd z(1.0, 1.0, -1.0, -1.0);
    q = z.asDiagonal() * q * z.asDiagonal();
  }
  out.kind = TrialKind::Herald;
  out.rho = q;
  // 1 - <Psi+|q|Psi+>, arranged to keep small infidelities accurate.
  out.infidelity = q(0, 0).real() + q(3, 3).real() +
                   0.5 * (q(1, 1).real() + q(2, 2).real()) - q(1, 2).real();
  return out;
}
}  // namespace

double JointEnsembleResult::herald_probability() const {
  return trials ? static_cast<double>(heralds) / static_cast<double>(trials) : 0.0;
}

double JointEnsembleResult::herald_probability_se() const {
  if (!trials) return 0.0;
  const double p = herald_probability();
  return std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

double JointEnsembleResult::empirical_rate() const { return herald_probability() / (pulse + t_reset); }

double JointEnsembleResult::empirical_rate_se() const {
  return herald_probability_se() / (pulse + t_reset);
}

std::string JointEnsembleResult::to_record() const {
  using detail::format_double;
  std::ostringstream out;
  out << "variant = " << to_string(variant) << '\n'
      << "left.g = " << format_double(left.g) << '\n'
      << "left.gamma = " << format_double(left.gamma) << '\n'
      << "left.efficiency = " << format_double(left.efficiency) << '\n'
      << "right.g = " << format_double(right.g) << '\n'
      << "right.gamma = " << format_double(right.gamma) << '\n'
      << "right.efficiency = " << format_double(right.efficiency) << '\n'
      << "pulse = " << format_double(pulse) << '\n'
      << "t_reset = " << format_double(t_reset) << '\n'
      << "cutoff.optical = " << cutoffs.optical << '\n'
      << "cutoff.microwave = " << cutoffs.microwave << '\n'
      << "trials = " << trials << '\n'
      << "seed = " << seed << '\n'
      << "heralds = " << heralds << '\n'
      << "plus_heralds = " << plus_heralds << '\n'
      << "minus_heralds = " << minus_heralds << '\n'
      << "no_clicks = " << no_clicks << '\n'
      << "double_clicks = " << double_clicks << '\n'
      << "lost = " << lost << '\n'
      << "rate = " << format_double(empirical_rate()) << '\n'
      << "rate_se = " << format_double(empirical_rate_se()) << '\n'
      << "fidelity = " << format_double(fidelity()) << '\n'
      << "infidelity = " << format_double(infidelity) << '\n'
      << "infidelity_se = " << format_double(infidelity_se) << '\n'
      << "leakage = " << format_double(leakage) << '\n';
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out << "rho." << i << j << " = " << format_double(rho(i, j).real()) << ' '
          << format_double(rho(i, j).imag()) << '\n';
  return out.str();
}

JointEnsembleResult herald_joint_pair(NodeDrive left, NodeDrive right, Detuning variant,
                                      double pulse, std::size_t trials, std::uint64_t seed,
                                      const JointHeraldOptions& options) {
  if (!(pulse > 0)) throw std::invalid_argument("pulse duration must be > 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (const NodeDrive& n : {left, right})
    if (!(n.efficiency > 0 && n.efficiency <= 1)) throw std::invalid_argument("efficiency must lie in (0, 1]");
  if (options.coincidence_window < 0) throw std::invalid_argument("coincidence window must be >= 0");

  FockCutoffs cutoffs = options.cutoffs.value_or(default_cutoffs(variant));
  for (;;) {
    JointContext ctx{variant, cutoffs,
                     build_effective_generator(variant, left.g, left.gamma, cutoffs),
                     build_effective_generator(variant, right.g, right.gamma, cutoffs),
                     nullptr, nullptr, {}, {}, options.coincidence_window > 0};
    const TruncatedTwoModeState init = initial_state(variant, cutoffs);
    const NoJumpPath path_l(ctx.gen_left, init.amplitudes(), pulse);
    const NoJumpPath path_r(ctx.gen_right, init.amplitudes(), pulse);
    ctx.left = &path_l;
    ctx.right = &path_r;
    ctx.eff_left = left.efficiency;
    ctx.eff_right = right.efficiency;
    const double keep_l = std::exp(-left.gamma * options.coincidence_window);
    const double keep_r = std::exp(-right.gamma * options.coincidence_window);
    for (int k = 0; k <= cutoffs.optical; ++k) {
      ctx.pow_left.push_back(std::pow(keep_l, k));
      ctx.pow_right.push_back(std::pow(keep_r, k));
    }

    // The pre-click evolution is shared by all trials, so most saturation is
    // visible on the checkpoints before any trial runs.
    bool saturated = false;
    if (variant == Detuning::Blue)
      for (const NoJumpPath* path : {&path_l, &path_r})
        for (double t : path->times()) {
          const Eigen::VectorXcd psi = path->state(t);
          const Eigen::VectorXcd jumped = ctx.gen_left.annihilate_optical * psi;
          // Right at t = 0 the jumped state is pure round-off.
          const bool resolved = jumped.squaredNorm() > 1e-20 * psi.squaredNorm();
          if (top_level_populated(psi, cutoffs) ||
              (resolved && top_level_populated(jumped, cutoffs))) {
            saturated = true;
            break;
          }
        }
    if (saturated) {
      if (cutoffs.optical >= options.max_cutoff || cutoffs.microwave >= options.max_cutoff)
        throw TrajectoryError("Fock cutoff saturation persists at cutoff " +
                              std::to_string(cutoffs.optical));
      ++cutoffs.optical;
      ++cutoffs.microwave;
      continue;
    }

    std::vector<TrialOutcome> outcomes(trials);
    const auto n = static_cast<std::int64_t>(trials);
    if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
      for (std::int64_t i = 0; i < n; ++i) outcomes[i] = run_joint_trial(ctx, seed, i);
    } else {
      for (std::int64_t i = 0; i < n; ++i) outcomes[i] = run_joint_trial(ctx, seed, i);
    }

    saturated =
        std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.saturated; });
    if (saturated) {
      if (cutoffs.optical >= options.max_cutoff || cutoffs.microwave >= options.max_cutoff)
        throw TrajectoryError("Fock cutoff saturation persists at cutoff " +
                              std::to_string(cutoffs.optical));
      ++cutoffs.optical;
      ++cutoffs.microwave;
      continue;
    }

    // Ordered reduction: identical for any worker count.
    JointEnsembleResult res;
    res.variant = variant;
    res.left = left;
    res.right = right;
    res.pulse = pulse;
    res.t_reset = options.t_reset;
    res.trials = trials;
    res.seed = seed;
    res.cutoffs = cutoffs;
    Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
    double mean = 0, m2 = 0, leak = 0;
    for (const auto& o : outcomes) {
      switch (o.kind) {
        case TrialKind::NoClick: ++res.no_clicks; break;
        case TrialKind::DoubleClick: ++res.double_clicks; break;
        case TrialKind::Lost: ++res.lost; break;
        case TrialKind::Herald: {
          ++res.heralds;
          (o.detector == Detector::Plus ? res.plus_heralds : res.minus_heralds)++;
          sum += o.rho;
          leak += o.leakage;
          const double delta = o.infidelity - mean;
          mean += delta / static_cast<double>(res.heralds);
          m2 += delta * (o.infidelity - mean);
          break;
        }
      }
    }
    if (res.heralds > 0) {
      res.rho = BellPairDensityMatrix::from_unnormalized(sum);
      res.infidelity = mean;
      res.leakage = leak / static_cast<double>(res.heralds);
      if (res.heralds > 1)
        res.infidelity_se = std::sqrt(m2 / static_cast<double>(res.heralds - 1) /
                                      static_cast<double>(res.heralds));
    }
    return res;
  }
}

JointEnsembleResult herald_joint_pair(const TransducerParams& left, const TransducerParams& right,
                                      double pump_power, Detuning variant, double pulse,
                                      std::size_t trials, std::uint64_t seed,
                                      JointHeraldOptions options) {
  if (options.t_reset == 0) options.t_reset = left.t_reset;
  return herald_joint_pair(node_drive(left, pump_power), node_drive(right, pump_power), variant,
                           pulse, trials, seed, options);
}

// --- infidelity scaling ----------------------------------------------------

ScalingFit measure_infidelity_scaling(Detuning variant, std::span<const double> ratios,
                                      std::size_t trials, std::uint64_t seed,
                                      const ScalingOptions& options) {
  if (ratios.size() < 2) throw std::invalid_argument("need at least two coupling ratios");
  ScalingFit fit;
  fit.variant = variant;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double ratio = ratios[i];
    if (!(ratio > 0 && ratio <= 0.25)) throw std::invalid_argument("coupling ratio outside (0, 0.25]");
    const double g = ratio * options.gamma;
    const double r0 = 4.0 * g * g / options.gamma;
    const double pulse = options.pulse_factor / (2.0 * r0);
    JointHeraldOptions jo;
    jo.execution = options.execution;
    const auto res = herald_joint_pair({g, options.gamma}, {g, options.gamma}, variant, pulse,
                                       trials, derive_seed(seed, i), jo);
    if (res.heralds < 2 || !(res.infidelity > 0))
      throw TrajectoryError("no usable heralds at g/gamma = " + std::to_string(ratio));
    fit.points.push_back({ratio, res.infidelity, res.infidelity_se, res.heralds});
  }

  // Ordinary least squares in log space; the covariance is the sandwich
  // estimator with the per-point Monte Carlo errors.
  const std::size_t n = fit.points.size();
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n), var_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = fit.points[i];
    x(i, 0) = 1.0;
    x(i, 1) = std::log(p.ratio);
    y(i) = std::log(p.infidelity);
    const double rel = p.infidelity_se / p.infidelity;
    var_y(i) = rel * rel;
  }
  const Eigen::Matrix2d xtx_inv = (x.transpose() * x).inverse();
  const Eigen::Vector2d beta = xtx_inv * x.transpose() * y;
  const Eigen::Matrix2d cov = xtx_inv * x.transpose() * var_y.asDiagonal() * x * xtx_inv;
  const Eigen::VectorXd resid = y - x * beta;

  fit.exponent = beta(1);
  fit.exponent_se = std::sqrt(cov(1, 1));
  fit.prefactor = std::exp(beta(0));
  fit.prefactor_se = fit.prefactor * std::sqrt(cov(0, 0));
  fit.residual = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  fit.residual_flag = fit.residual > options.residual_threshold;
  return fit;
}

}  // namespace hent
