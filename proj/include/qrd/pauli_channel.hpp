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

// Forward and reverse trajectories of a single continuously monitored Pauli
// channel, their closed-form solutions, and the reverse stochastic master
// equation.
//
// Forward (0 <= t <= T):
//   d|psi> = (-p/2 dt + sqrt(p) L dW)|psi>,   dW = sqrt(p)<L + L^dag> dt + dW_hat
// Reverse (T <= t <= 2T), started from the normalized forward state:
//   d|phi> = ((-p/2 - X/(2T - t) sqrt(p) L) dt + sqrt(p) L dW)|phi>
//   dX     = -X/(2T - t) dt + dW,   X(T) = W(T),  X(2T) = 0
// with L = P (dissipative) or L = iP (conserving).
//
// Closed forms: the forward solution is exp(-p t + sqrt(p) P W(t)) for L = P
// and exp(i sqrt(p) P W(t)) for L = iP. The reverse solution multiplies by
// exp((X(t) - W(t)) sqrt(p) L), so at t = 2T the state is proportional to the
// initial one.

#pragma once

#include <optional>
#include <utility>

#include "qrd/trajectory.hpp"

namespace qrd {

struct ChannelConfig {
  PauliString P = PauliString::parse("X");
  Mode mode = Mode::Dissipative;
  double p = 0.2;
  double T = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  Stepper stepper = Stepper::Exact;
  ReverseNoise reverse_noise = ReverseNoise::Detector;

  std::size_t steps() const { return whole_steps(T, dt); }

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise strength p must lie in [0, 1]");
    if (P.qubits() == 0) throw std::invalid_argument("empty Pauli word");
    (void)steps();
  }

  Operator jump_operator() const {
    const Operator m = pauli_matrix(P);
    return mode == Mode::Dissipative ? m : Operator(kI * m);
  }

  /// Coefficient c with L = c P.
  cplx jump_phase() const { return mode == Mode::Dissipative ? cplx(1.0) : kI; }
};

//---------------------------------------------------------------------------//
// Single steps
//---------------------------------------------------------------------------//

/// Euler-Maruyama step of the forward SDE.
inline QuantumState forward_step_em(QuantumState state, const ChannelConfig& cfg, double dw) {
  const double sp = std::sqrt(cfg.p);
  const Amplitudes Pv = cfg.P.apply(state.amplitudes());
  state.amplitudes() = (1.0 - 0.5 * cfg.p * cfg.dt) * state.amplitudes() + (sp * dw) * cfg.jump_phase() * Pv;
  state.rescale();
  return state;
}

/// Per-step closed-form propagator exp(a + b P) of the forward SDE.
inline std::pair<cplx, cplx> forward_step_exponent(const ChannelConfig& cfg, double dw) {
  const double sp = std::sqrt(cfg.p);
  if (cfg.mode == Mode::Dissipative) return {cplx(-cfg.p * cfg.dt), cplx(sp * dw)};
  return {cplx(0.0), kI * (sp * dw)};
}

inline QuantumState forward_step_exact(QuantumState state, const ChannelConfig& cfg, double dw) {
  const auto [a, b] = forward_step_exponent(cfg, dw);
  apply_exp_affine_pauli(state, a, b, cfg.P);
  return state;
}

/// F(t)|psi0> for an observed record value W(t).
inline QuantumState forward_exact(const QuantumState& psi0, const ChannelConfig& cfg, double W_t, double t) {
  if (t < 0.0 || t > 2.0 * cfg.T * (1.0 + 1e-12)) throw std::invalid_argument("forward_exact: t outside [0, 2T]");
  const double sp = std::sqrt(cfg.p);
  QuantumState out = psi0;
  if (cfg.mode == Mode::Dissipative)
    apply_exp_affine_pauli(out, -cfg.p * t, sp * W_t, cfg.P);
  else
    apply_exp_affine_pauli(out, 0.0, kI * (sp * W_t), cfg.P);
  return out;
}

/// R(t) F(t)|psi0> with R(t) = exp((X(t) - W(t)) sqrt(p) L).
inline QuantumState reverse_exact(const QuantumState& psi0, const ChannelConfig& cfg, double X_t, double W_t,
                                  double t) {
  if (t < cfg.T * (1.0 - 1e-12) || t > 2.0 * cfg.T * (1.0 + 1e-12))
    throw std::invalid_argument("reverse_exact: t outside [T, 2T]");
  QuantumState out = forward_exact(psi0, cfg, W_t, t);
  const cplx b = std::sqrt(cfg.p) * (X_t - W_t) * cfg.jump_phase();
  apply_exp_affine_pauli(out, 0.0, b, cfg.P);
  return out;
}

inline BridgeState reverse_bridge(const ChannelConfig& cfg, double W_T) {
  BridgeState b;
  b.x = W_T;
  b.t = cfg.T;
  b.t_end = 2.0 * cfg.T;
  b.x_end = 0.0;
  b.gamma = 1.0;
  return b;
}

/// Euler-Maruyama step of the reverse SDE; the bridge drift is evaluated at
/// the left point.
inline std::pair<QuantumState, BridgeState> reverse_step_em(QuantumState state, const ChannelConfig& cfg,
                                                            const BridgeState& bridge, double dw) {
  const double remaining = bridge.t_end - bridge.t;
  if (remaining < 0.5 * cfg.dt) throw std::out_of_range("reverse_step_em: stepping past 2T");
  const double sp = std::sqrt(cfg.p);
  const double pull = bridge.x.real() / remaining;
  const cplx coeff = sp * (dw - pull * cfg.dt) * cfg.jump_phase();
  const Amplitudes Pv = cfg.P.apply(state.amplitudes());
  state.amplitudes() = (1.0 - 0.5 * cfg.p * cfg.dt) * state.amplitudes() + coeff * Pv;
  state.rescale();
  return {std::move(state), bridge_step(bridge, dw, cfg.dt)};
}

/// Exact step: advance the bridge, then apply exp(-p dt + sqrt(p) L dX)
/// (dissipative) or exp(i sqrt(p) P dX) (conserving).
inline std::pair<QuantumState, BridgeState> reverse_step_exact(QuantumState state, const ChannelConfig& cfg,
                                                               const BridgeState& bridge, double dw) {
  BridgeState next = bridge_step(bridge, dw, cfg.dt);
  const double dx = (next.x - bridge.x).real();
  const double sp = std::sqrt(cfg.p);
  if (cfg.mode == Mode::Dissipative)
    apply_exp_affine_pauli(state, -cfg.p * cfg.dt, sp * dx, cfg.P);
  else
    apply_exp_affine_pauli(state, 0.0, kI * (sp * dx), cfg.P);
  return {std::move(state), next};
}

inline std::pair<QuantumState, BridgeState> reverse_step(QuantumState state, const ChannelConfig& cfg,
                                                         const BridgeState& bridge, double dw) {
  return cfg.stepper == Stepper::Exact ? reverse_step_exact(std::move(state), cfg, bridge, dw)
                                       : reverse_step_em(std::move(state), cfg, bridge, dw);
}

//---------------------------------------------------------------------------//
// Reverse stochastic master equation
//---------------------------------------------------------------------------//

/// Euler: the literal Ito SME update
///   drho = (-X/(2T-t) sqrt(p){L,rho} + p(L rho L^dag - rho)) dt + sqrt(p){L,rho} dW.
/// ItoProduct: rho <- M rho M^dag with M the Euler-Maruyama propagator; its
///   first-order part is the Euler update and it matches outer products of
///   Euler-Maruyama pure trajectories exactly.
/// Exact: rho <- M rho M^dag with the per-step closed-form propagator.
enum class SmeScheme : std::uint8_t { Euler, ItoProduct, Exact };

inline std::pair<DensityMatrix, BridgeState> sme_reverse_step(const DensityMatrix& rho, const ChannelConfig& cfg,
                                                              const BridgeState& bridge, double dw,
                                                              SmeScheme scheme = SmeScheme::ItoProduct) {
  const double remaining = bridge.t_end - bridge.t;
  if (remaining < 0.5 * cfg.dt) throw std::out_of_range("sme_reverse_step: stepping past 2T");
  const BridgeState next = bridge_step(bridge, dw, cfg.dt);
  const double sp = std::sqrt(cfg.p);
  const auto d = rho.dim();
  const Operator L = cfg.jump_operator();
  const Operator& r = rho.entries();
  Operator out;
  switch (scheme) {
    case SmeScheme::Euler: {
      const Operator anti = L * r + r * L.adjoint();
      const double pull = bridge.x.real() / remaining;
      out = r + (-pull * sp * cfg.dt + sp * dw) * anti + cfg.p * cfg.dt * (L * r * L.adjoint() - r);
      break;
    }
    case SmeScheme::ItoProduct: {
      const double pull = bridge.x.real() / remaining;
      const Operator M = (1.0 - 0.5 * cfg.p * cfg.dt) * Operator::Identity(d, d) + sp * (dw - pull * cfg.dt) * L;
      out = M * r * M.adjoint();
      break;
    }
    case SmeScheme::Exact: {
      const double dx = (next.x - bridge.x).real();
      const Operator M = cfg.mode == Mode::Dissipative ? exp_affine_pauli(-cfg.p * cfg.dt, sp * dx, cfg.P)
                                                       : exp_affine_pauli(0.0, kI * (sp * dx), cfg.P);
      out = M * r * M.adjoint();
      break;
    }
  }
  DensityMatrix result(std::move(out));
  // Keep the trace O(1); the SME is linear so only the direction matters.
  const double tr = result.trace();
  if (tr > 0.0 && (tr < 1e-6 || tr > 1e6)) result.entries() /= tr;
  return {std::move(result), next};
}

//---------------------------------------------------------------------------//
// Trajectory drivers
//---------------------------------------------------------------------------//

inline TrajectoryResult run_forward(const ChannelConfig& cfg, const QuantumState& psi0,
                                    std::uint64_t trajectory = 0) {
  cfg.validate();
  if (static_cast<std::size_t>(psi0.dim()) != cfg.P.dim())
    throw std::invalid_argument("run_forward: state and Pauli word dimensions differ");
  const std::size_t n = cfg.steps();
  NoiseStream stream(cfg.seed, trajectory, channel::kForward);
  TrajectoryResult res;
  res.t0 = 0.0;
  res.dt = cfg.dt;
  res.record = MeasurementRecord(1, cfg.dt);
  res.states.reserve(n + 1);
  res.states.push_back(psi0);
  QuantumState psi = psi0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dw = measurement_increment(psi, cfg.P, cfg.mode, cfg.p, cfg.dt, stream);
    const double step[1] = {dw};
    res.record.append(step);
    psi = cfg.stepper == Stepper::Exact ? forward_step_exact(std::move(psi), cfg, dw)
                                        : forward_step_em(std::move(psi), cfg, dw);
    res.states.push_back(psi);
  }
  res.terminal_fidelity = fidelity(psi, psi0);
  return res;
}

/// Reverse segment on [T, 2T] from the normalized forward state. psi0 is used
/// only for scoring.
inline double reverse_increment(const QuantumState& phi, const ChannelConfig& cfg, NoiseStream& stream) {
  if (cfg.reverse_noise == ReverseNoise::Innovation) return wiener_increment(stream, cfg.dt);
  return measurement_increment(phi, cfg.P, cfg.mode, cfg.p, cfg.dt, stream);
}

inline TrajectoryResult run_reverse(const ChannelConfig& cfg, const QuantumState& psi_T, double W_T,
                                    const std::optional<QuantumState>& psi0 = std::nullopt,
                                    std::uint64_t trajectory = 0) {
  cfg.validate();
  const std::size_t n = cfg.steps();
  NoiseStream stream(cfg.seed, trajectory, channel::kReverse);
  TrajectoryResult res;
  res.t0 = cfg.T;
  res.dt = cfg.dt;
  res.record = MeasurementRecord(1, cfg.dt);
  res.states.reserve(n + 1);
  QuantumState phi(psi_T.normalized());
  res.states.push_back(phi);
  BridgeState bridge = reverse_bridge(cfg, W_T);
  for (std::size_t i = 0; i < n; ++i) {
    bridge.t = cfg.T + static_cast<double>(i) * cfg.dt;
    const double dw = reverse_increment(phi, cfg, stream);
    const double step[1] = {dw};
    res.record.append(step);
    std::tie(phi, bridge) = reverse_step(std::move(phi), cfg, bridge, dw);
    res.states.push_back(phi);
  }
  if (psi0) res.terminal_fidelity = fidelity(phi, *psi0);
  return res;
}

/// Observed increment for a density matrix: sqrt(p) tr((L + L^dag) rho)/tr(rho) dt + dW_hat.
inline double measurement_increment(const DensityMatrix& rho, const ChannelConfig& cfg, NoiseStream& stream) {
  double signal = 0.0;
  if (cfg.mode == Mode::Dissipative) {
    const double tr = rho.trace();
    if (!(tr > 0.0)) throw std::domain_error("measurement_increment: non-positive trace");
    signal = 2.0 * (pauli_matrix(cfg.P) * rho.entries()).trace().real() / tr;
  }
  return std::sqrt(cfg.p) * signal * cfg.dt + wiener_increment(stream, cfg.dt);
}

struct SmeResult {
  std::vector<DensityMatrix> states;  // t = T + n dt
  MeasurementRecord record;
};

/// Reverse SME on [T, 2T] started from rho_T. With the same seed and
/// trajectory index it consumes the same innovations as run_reverse.
inline SmeResult run_sme_reverse(const ChannelConfig& cfg, const DensityMatrix& rho_T, double W_T,
                                 SmeScheme scheme = SmeScheme::ItoProduct, std::uint64_t trajectory = 0) {
  cfg.validate();
  if (static_cast<std::size_t>(rho_T.dim()) != cfg.P.dim())
    throw std::invalid_argument("run_sme_reverse: density matrix and Pauli word dimensions differ");
  const std::size_t n = cfg.steps();
  NoiseStream stream(cfg.seed, trajectory, channel::kReverse);
  SmeResult res;
  res.record = MeasurementRecord(1, cfg.dt);
  res.states.reserve(n + 1);
  DensityMatrix rho(rho_T.normalized());
  res.states.push_back(rho);
  BridgeState bridge = reverse_bridge(cfg, W_T);
  for (std::size_t i = 0; i < n; ++i) {
    bridge.t = cfg.T + static_cast<double>(i) * cfg.dt;
    const double dw = cfg.reverse_noise == ReverseNoise::Innovation ? wiener_increment(stream, cfg.dt)
                                                                    : measurement_increment(rho, cfg, stream);
    const double step[1] = {dw};
    res.record.append(step);
    std::tie(rho, bridge) = sme_reverse_step(rho, cfg, bridge, dw, scheme);
    res.states.push_back(rho);
  }
  return res;
}

/// Forward segment followed by the reverse segment started from it.
struct ForwardReverse {
  TrajectoryResult forward;
  TrajectoryResult reverse;
};

inline ForwardReverse run_forward_reverse(const ChannelConfig& cfg, const QuantumState& psi0,
                                          std::uint64_t trajectory = 0) {
  ForwardReverse fr;
  fr.forward = run_forward(cfg, psi0, trajectory);
  fr.reverse = run_reverse(cfg, fr.forward.terminal(), fr.forward.record.W(0), psi0, trajectory);
  return fr;
}

}  // namespace qrd
