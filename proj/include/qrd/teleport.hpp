// Copyright 2026 The qrd Authors
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

// Applying the dissipative reverse drift by teleportation.
//
// The drift over one step is the normalized imaginary-time operator
//   R = exp(theta L) / ||exp(theta L)||,  theta = sqrt(p) dY,
// with eigenvalues 1 and lambda_min = exp(-2|theta|). A teleportation round at
// attempt r implements one of the Kraus operators K_P = R^n P, n = 2^r, where
// P = prod_u X_u^{j_u} Z_u^{l_u} is the Bell-measurement byproduct. Outcomes
// are sampled from the Kraus norms; circuits are not simulated.
//
// After the byproduct is undone the state is R phi (P commutes with L, good)
// or R^-1-like P R P phi (P anticommutes, bad). A bad outcome at attempt r
// leaves R'^(2^(r+1) - 1) phi with R' = P R P, and the next round with R^(2^(r+1))
// cancels it through R^n R'^n = lambda_min^n I.

#pragma once

#include <optional>
#include <vector>

#include "qrd/pauli_channel.hpp"

namespace qrd {

//---------------------------------------------------------------------------//
// Drift operator
//---------------------------------------------------------------------------//

struct DriftOp {
  PauliString L;
  double dy = 0.0;
  double p = 0.0;
  std::uint64_t power = 1;

  double theta() const { return std::sqrt(p) * dy; }

  /// R^power = a I + b L with real a, b; stable for any power.
  std::pair<double, double> coefficients() const {
    const double th = theta();
    const double e = std::exp(-2.0 * static_cast<double>(power) * std::abs(th));
    const double a = 0.5 * (1.0 + e);
    const double b = (th > 0.0 ? 0.5 : (th < 0.0 ? -0.5 : 0.0)) * (1.0 - e);
    return {a, b};
  }

  double lambda_min() const { return std::exp(-2.0 * std::abs(theta())); }

  Amplitudes apply(const Amplitudes& v) const {
    const auto [a, b] = coefficients();
    return a * v + b * L.apply(v);
  }
};

inline Operator drift_operator(double dy, double p, const PauliString& L, std::uint64_t power = 1) {
  if (power == 0 || (power & (power - 1)) != 0) throw std::invalid_argument("drift power must be a power of two");
  const auto [a, b] = DriftOp{L, dy, p, power}.coefficients();
  const auto d = static_cast<Eigen::Index>(L.dim());
  return a * Operator::Identity(d, d) + b * pauli_matrix(L);
}

inline double lambda_min(double dy, double p) { return std::exp(-2.0 * std::sqrt(p) * std::abs(dy)); }

//---------------------------------------------------------------------------//
// Byproducts
//---------------------------------------------------------------------------//

/// prod_u X^{j_u} Z^{l_u}; qubit u corresponds to bit (m - 1 - u) of the masks.
inline PauliString byproduct_string(std::size_t m, std::uint32_t j, std::uint32_t l) {
  std::vector<Axis> w(m, Axis::I);
  for (std::size_t u = 0; u < m; ++u) {
    const std::uint32_t bit = 1u << (m - 1 - u);
    const bool x = (j & bit) != 0, z = (l & bit) != 0;
    w[u] = x ? (z ? Axis::Y : Axis::X) : (z ? Axis::Z : Axis::I);
  }
  return PauliString(std::move(w));
}

/// The fixed anticommuting reference string: one factor on the first
/// non-identity qubit of L, Z there unless L has Z, in which case X.
inline PauliString reference_anticommuting(const PauliString& L) {
  std::vector<Axis> w(L.qubits(), Axis::I);
  for (std::size_t u = 0; u < L.qubits(); ++u) {
    if (L[u] == Axis::I) continue;
    w[u] = L[u] == Axis::Z ? Axis::X : Axis::Z;
    return PauliString(std::move(w));
  }
  throw std::invalid_argument("identity L has no anticommuting Pauli string");
}

struct ByproductClass {
  bool good = true;
  PauliString p_star;  // anticommuting reference (bad branch only)
  PauliString C;       // P_* P up to phase; commutes with L
};

inline ByproductClass classify_byproduct(const PauliString& P, const PauliString& L) {
  if (P.qubits() != L.qubits()) throw std::invalid_argument("classify_byproduct: qubit counts differ");
  ByproductClass out;
  out.good = P.commutes_with(L);
  if (out.good) {
    out.p_star = PauliString::identity(P.qubits());
    out.C = PauliString::identity(P.qubits());
    return out;
  }
  out.p_star = reference_anticommuting(L);
  out.C = out.p_star.multiply(P).second;
  return out;
}

//---------------------------------------------------------------------------//
// One teleportation round
//---------------------------------------------------------------------------//

struct TeleportOutcome {
  std::uint32_t j = 0;
  std::uint32_t l = 0;
  PauliString byproduct;
  bool good = true;
  double probability = 0.0;
  QuantumState post_state;  // normalized, byproduct undone
};

/// Probabilities of all 4^m outcomes, indexed by (j << m) | l. The
/// normalizer 4^m (1 + lambda_min^(2n))/2 is state independent.
inline std::vector<double> outcome_probabilities(const Amplitudes& state, const DriftOp& drift) {
  const std::size_t m = drift.L.qubits();
  const double n2 = state.squaredNorm();
  if (!(n2 > 0.0)) throw std::domain_error("teleport: zero-norm state");
  const auto [a, b] = drift.coefficients();
  const double e = std::exp(-4.0 * static_cast<double>(drift.power) * std::abs(drift.theta()));
  const double Z = std::ldexp(0.5 * (1.0 + e), static_cast<int>(2 * m));
  const std::uint32_t count = 1u << m;
  std::vector<double> prob(static_cast<std::size_t>(count) * count);
  for (std::uint32_t j = 0; j < count; ++j) {
    for (std::uint32_t l = 0; l < count; ++l) {
      const Amplitudes v = byproduct_string(m, j, l).apply(state);
      const Amplitudes k = a * v + b * drift.L.apply(v);
      prob[(static_cast<std::size_t>(j) << m) | l] = k.squaredNorm() / (n2 * Z);
    }
  }
  return prob;
}

inline TeleportOutcome teleport_round(const QuantumState& state, const DriftOp& drift, NoiseStream& stream) {
  const std::size_t m = drift.L.qubits();
  if (static_cast<std::size_t>(state.dim()) != drift.L.dim())
    throw std::invalid_argument("teleport_round: state and L dimensions differ");
  const Amplitudes v = state.normalized();
  const auto prob = outcome_probabilities(v, drift);
  const double u = stream.uniform();
  double acc = 0.0;
  std::size_t idx = prob.size() - 1;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    acc += prob[i];
    if (u < acc) {
      idx = i;
      break;
    }
  }
  // Guard the tail against rounding: never select a zero-probability outcome.
  while (prob[idx] <= 0.0 && idx > 0) --idx;

  TeleportOutcome out;
  out.j = static_cast<std::uint32_t>(idx >> m);
  out.l = static_cast<std::uint32_t>(idx & ((1u << m) - 1));
  out.byproduct = byproduct_string(m, out.j, out.l);
  out.good = out.byproduct.commutes_with(drift.L);
  out.probability = prob[idx];
  // K_P = R^n P, then undo P (phase dropped).
  const Amplitudes k = out.byproduct.apply(drift.apply(out.byproduct.apply(v)));
  out.post_state = QuantumState(k / k.norm());
  return out;
}

//---------------------------------------------------------------------------//
// Bounds and budgets
//---------------------------------------------------------------------------//

/// State-independent bound on the bad-branch probability at attempt r.
inline double worst_case_fail_prob(unsigned r, double p, double dy) {
  return 0.5 * (1.0 + std::abs(std::tanh(std::ldexp(std::sqrt(p) * dy, static_cast<int>(r) + 1))));
}

class InfeasibleBudget : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr unsigned kMaxAttempts = 64;

/// Smallest d with d (1 - log2(1 + eta)) >= log2(1/epsilon),
/// eta = |tanh(2^d sqrt(p) dy)|.
inline unsigned d_min(double epsilon, double p, double dy) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("d_min: epsilon must lie in (0, 1)");
  const double target = std::log2(1.0 / epsilon);
  const double th = std::sqrt(p) * dy;
  for (unsigned d = 1; d <= kMaxAttempts; ++d) {
    const double eta = std::abs(std::tanh(std::ldexp(th, static_cast<int>(d))));
    if (static_cast<double>(d) * (1.0 - std::log2(1.0 + eta)) >= target) return d;
  }
  throw InfeasibleBudget("no budget of at most 64 attempts reaches the target failure probability");
}

struct ResourceBudget {
  double epsilon = 1e-3;
  unsigned d = kMaxAttempts;
  double delta = 1e-3;  // post-selection failure probability per resource state

  void validate() const {
    if (d < 1 || d > kMaxAttempts) throw std::invalid_argument("budget d must lie in [1, 64]");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("budget epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("budget delta must lie in (0, 1)");
  }

  /// Bell pairs consumed by the post-selected resource state of one attempt.
  unsigned bell_pairs_per_attempt() const { return static_cast<unsigned>(std::ceil(std::log2(1.0 / delta) - 1e-12)); }

  /// (1/2)^d (1 + eta)^d <= epsilon with eta = |tanh(2^d sqrt(p) dy)|.
  bool sufficient(double p, double dy) const {
    const double eta = std::abs(std::tanh(std::ldexp(std::sqrt(p) * dy, static_cast<int>(d))));
    return static_cast<double>(d) * (std::log2(1.0 + eta) - 1.0) <= std::log2(epsilon);
  }
};

/// Aggregated resource usage; merge is associative and commutative.
struct ResourceLedger {
  std::uint64_t applications = 0;  // drift applications attempted
  std::uint64_t attempts = 0;
  std::uint64_t failures = 0;
  std::uint64_t bell_pairs = 0;
  std::uint64_t skipped = 0;      // dY = 0 steps
  std::uint64_t infeasible = 0;   // steps where no d <= 64 meets epsilon
  unsigned max_attempts = 0;
  unsigned max_d_min = 0;
  std::vector<std::uint64_t> attempt_histogram = std::vector<std::uint64_t>(kMaxAttempts + 1, 0);

  void merge(const ResourceLedger& o) {
    applications += o.applications;
    attempts += o.attempts;
    failures += o.failures;
    bell_pairs += o.bell_pairs;
    skipped += o.skipped;
    infeasible += o.infeasible;
    max_attempts = std::max(max_attempts, o.max_attempts);
    max_d_min = std::max(max_d_min, o.max_d_min);
    for (std::size_t i = 0; i < attempt_histogram.size(); ++i) attempt_histogram[i] += o.attempt_histogram[i];
  }
};

//---------------------------------------------------------------------------//
// Repeated teleportation
//---------------------------------------------------------------------------//

struct DriftApplication {
  QuantumState state;  // normalized
  unsigned attempts = 0;
  bool failed = false;
};

inline DriftApplication run_drift_application(const QuantumState& state, double dy, double p, const PauliString& L,
                                              const ResourceBudget& budget, NoiseStream& stream) {
  budget.validate();
  DriftApplication out;
  out.state = QuantumState(state.normalized());
  if (dy == 0.0 || p == 0.0) {
    // R = I: every outcome is correctable, nothing to teleport.
    return out;
  }
  for (unsigned r = 0; r < budget.d; ++r) {
    const DriftOp drift{L, dy, p, std::uint64_t{1} << r};
    auto o = teleport_round(out.state, drift, stream);
    out.state = std::move(o.post_state);
    out.attempts = r + 1;
    if (o.good) return out;
  }
  out.failed = true;
  return out;
}

//---------------------------------------------------------------------------//
// Protocol
//---------------------------------------------------------------------------//

struct TeleportConfig {
  ChannelConfig channel;
  ResourceBudget budget;

  void validate() const {
    channel.validate();
    budget.validate();
    if (channel.mode != Mode::Dissipative)
      throw std::invalid_argument("teleportation protocol applies to the dissipative reverse drift");
  }
};

struct ProtocolStep {
  QuantumState state;
  unsigned attempts = 0;
  bool failed = false;
  bool skipped = false;
};

/// Weak measurement exp(-p dt + sqrt(p) L dW), then the drift exp(sqrt(p) L dY)
/// by teleportation. On success the result is proportional to the exact reverse step.
inline ProtocolStep protocol_step(const QuantumState& state, double dw, double dy, const TeleportConfig& cfg,
                                  NoiseStream& stream) {
  const auto& ch = cfg.channel;
  QuantumState measured = state;
  apply_exp_affine_pauli(measured, -ch.p * ch.dt, std::sqrt(ch.p) * dw, ch.P);
  ProtocolStep out;
  if (dy == 0.0 || ch.p == 0.0) {
    out.state = QuantumState(measured.normalized());
    out.skipped = true;
    return out;
  }
  auto app = run_drift_application(measured, dy, ch.p, ch.P, cfg.budget, stream);
  out.state = std::move(app.state);
  out.attempts = app.attempts;
  out.failed = app.failed;
  return out;
}

struct TeleportRun {
  TrajectoryResult trajectory;  // states up to and including the failing step
  bool failed = false;
  std::optional<std::size_t> failed_step;
  ResourceLedger ledger;
};

/// Reverse segment on [T, 2T] driven by the teleportation protocol. Stops at
/// the first exhausted budget.
inline TeleportRun run_teleport(const TeleportConfig& cfg, const QuantumState& psi_T, double W_T,
                                const std::optional<QuantumState>& psi0 = std::nullopt,
                                std::uint64_t trajectory = 0) {
  cfg.validate();
  const auto& ch = cfg.channel;
  const std::size_t n = ch.steps();
  NoiseStream meas(ch.seed, trajectory, channel::kReverse);
  NoiseStream bell(ch.seed, trajectory, channel::kTeleport);
  TeleportRun run;
  TrajectoryResult& res = run.trajectory;
  res.t0 = ch.T;
  res.dt = ch.dt;
  res.record = MeasurementRecord(1, ch.dt);
  res.states.reserve(n + 1);
  QuantumState phi(psi_T.normalized());
  res.states.push_back(phi);
  BridgeState bridge = reverse_bridge(ch, W_T);
  const unsigned bell_per_attempt = cfg.budget.bell_pairs_per_attempt();
  for (std::size_t i = 0; i < n; ++i) {
    bridge.t = ch.T + static_cast<double>(i) * ch.dt;
    const double dw = reverse_increment(phi, ch, meas);
    const double step[1] = {dw};
    res.record.append(step);
    const BridgeState next = bridge_step(bridge, dw, ch.dt);
    const double dy = (next.x - bridge.x).real() - dw;
    bridge = next;

    auto ps = protocol_step(phi, dw, dy, cfg, bell);
    auto& L = run.ledger;
    if (ps.skipped) {
      ++L.skipped;
    } else {
      ++L.applications;
      L.attempts += ps.attempts;
      L.bell_pairs += static_cast<std::uint64_t>(ps.attempts) * bell_per_attempt;
      L.max_attempts = std::max(L.max_attempts, ps.attempts);
      ++L.attempt_histogram[std::min<std::size_t>(ps.attempts, kMaxAttempts)];
      try {
        L.max_d_min = std::max(L.max_d_min, d_min(cfg.budget.epsilon, ch.p, dy));
      } catch (const InfeasibleBudget&) {
        ++L.infeasible;
      }
    }
    res.attempts.push_back(ps.attempts);
    phi = std::move(ps.state);
    res.states.push_back(phi);
    if (ps.failed) {
      ++L.failures;
      res.failures = 1;
      run.failed = true;
      run.failed_step = i;
      break;
    }
  }
  if (psi0) res.terminal_fidelity = fidelity(phi, *psi0);
  return run;
}

}  // namespace qrd
