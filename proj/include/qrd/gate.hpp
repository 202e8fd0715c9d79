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

// Diffusion-driven gates. On [T, 2T] an information-conserving channel L = iP
// is driven by a bridge pinned at X(2T) = -theta/sqrt(p) instead of 0:
//   d|psi> = ((-p/2 - i (theta/sqrt(p) + X)/(2T - t) sqrt(p) P) dt + i sqrt(p) P dW)|psi>
//   dX     = -(theta/sqrt(p) + X)/(2T - t) dt + dW,   X(T) = 0
// so the accumulated propagator is exp(i sqrt(p) P X(2T)) = exp(-i theta P).

#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "qrd/trajectory.hpp"

namespace qrd {

/// Distribution of the rotation angle for manifold runs.
struct ThetaSampler {
  enum class Kind : std::uint8_t { Point, Uniform };
  Kind kind = Kind::Point;
  double lo = 0.0;  // Point uses lo
  double hi = 0.0;

  static ThetaSampler point(double theta) { return {Kind::Point, theta, theta}; }
  static ThetaSampler uniform(double lo, double hi) {
    if (!(hi >= lo)) throw std::invalid_argument("uniform theta sampler needs hi >= lo");
    return {Kind::Uniform, lo, hi};
  }

  double draw(NoiseStream& stream) const {
    if (kind == Kind::Point) return lo;
    return lo + (hi - lo) * stream.uniform();
  }
};

struct GateConfig {
  double theta = std::numbers::pi / 2;
  PauliString P = PauliString::parse("X");
  double p = 0.2;
  double T = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  Stepper stepper = Stepper::Exact;
  std::optional<ThetaSampler> theta_sampler;

  std::size_t steps() const { return whole_steps(T, dt); }

  void validate() const {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("gate requires 0 < p <= 1");
    if (P.qubits() == 0 || P.is_identity()) throw std::invalid_argument("gate generator must be a non-identity Pauli word");
    (void)steps();
  }

  double x_end() const { return -theta / std::sqrt(p); }
};

/// G(theta) = cos(theta) I - i sin(theta) P.
inline Operator gate_operator(double theta, const PauliString& P) { return exp_affine_pauli(0.0, cplx(0.0, -theta), P); }

inline QuantumState gate_target(const QuantumState& psi0, double theta, const PauliString& P) {
  QuantumState out = psi0;
  apply_exp_affine_pauli(out, 0.0, cplx(0.0, -theta), P);
  return out;
}

inline BridgeState gate_bridge(const GateConfig& cfg) {
  BridgeState b;
  b.x = 0.0;
  b.t = cfg.T;
  b.t_end = 2.0 * cfg.T;
  b.x_end = cfg.x_end();
  b.gamma = 1.0;
  return b;
}

/// Drift strength |H_hat| = |theta/sqrt(p) + X| sqrt(p)/(2T - t) at the bridge's current point.
inline double gate_drift_strength(const GateConfig& cfg, const BridgeState& b) {
  const double remaining = b.t_end - b.t;
  return std::abs((b.x - b.x_end).real()) * std::sqrt(cfg.p) / remaining;
}

inline std::pair<QuantumState, BridgeState> gate_step_em(QuantumState state, const GateConfig& cfg,
                                                         const BridgeState& bridge, double dw) {
  const double remaining = bridge.t_end - bridge.t;
  if (remaining < 0.5 * cfg.dt) throw std::out_of_range("gate_step_em: stepping past 2T");
  const double sp = std::sqrt(cfg.p);
  const double pull = (bridge.x - bridge.x_end).real() / remaining;
  const Amplitudes Pv = cfg.P.apply(state.amplitudes());
  state.amplitudes() = (1.0 - 0.5 * cfg.p * cfg.dt) * state.amplitudes() + kI * (sp * (dw - pull * cfg.dt)) * Pv;
  state.rescale();
  return {std::move(state), bridge_step(bridge, dw, cfg.dt)};
}

/// Unitary step exp(i sqrt(p) P dX).
inline std::pair<QuantumState, BridgeState> gate_step_exact(QuantumState state, const GateConfig& cfg,
                                                            const BridgeState& bridge, double dw) {
  const BridgeState next = bridge_step(bridge, dw, cfg.dt);
  apply_exp_affine_pauli(state, 0.0, kI * (std::sqrt(cfg.p) * (next.x - bridge.x).real()), cfg.P);
  return {std::move(state), next};
}

inline TrajectoryResult run_gate(const GateConfig& cfg, const QuantumState& psi0, std::uint64_t trajectory = 0) {
  cfg.validate();
  if (static_cast<std::size_t>(psi0.dim()) != cfg.P.dim())
    throw std::invalid_argument("run_gate: state and Pauli word dimensions differ");
  const std::size_t n = cfg.steps();
  NoiseStream stream(cfg.seed, trajectory, channel::kReverse);
  TrajectoryResult res;
  res.t0 = cfg.T;
  res.dt = cfg.dt;
  res.theta = cfg.theta;
  res.record = MeasurementRecord(1, cfg.dt);
  res.states.reserve(n + 1);
  QuantumState psi(psi0.normalized());
  res.states.push_back(psi);
  BridgeState b = gate_bridge(cfg);
  for (std::size_t i = 0; i < n; ++i) {
    b.t = cfg.T + static_cast<double>(i) * cfg.dt;
    res.max_drift_strength = std::max(res.max_drift_strength, gate_drift_strength(cfg, b));
    // Information-conserving channel: the record is pure innovation.
    const double dw = wiener_increment(stream, cfg.dt);
    const double step[1] = {dw};
    res.record.append(step);
    std::tie(psi, b) = cfg.stepper == Stepper::Exact ? gate_step_exact(std::move(psi), cfg, b, dw)
                                                     : gate_step_em(std::move(psi), cfg, b, dw);
    res.states.push_back(psi);
  }
  res.terminal_fidelity = fidelity(psi, gate_target(psi0, cfg.theta, cfg.P));
  return res;
}

/// Config of manifold run i: theta drawn from the configured sampler (a point
/// mass at cfg.theta when none is set) on stream (seed, i, kTheta).
inline GateConfig gate_config_for(const GateConfig& cfg, std::uint64_t i) {
  GateConfig run = cfg;
  if (cfg.theta_sampler) {
    NoiseStream ts(cfg.seed, i, channel::kTheta);
    run.theta = cfg.theta_sampler->draw(ts);
  }
  return run;
}

inline std::vector<TrajectoryResult> run_gate_manifold(const GateConfig& cfg, const QuantumState& psi0,
                                                       std::size_t n) {
  std::vector<TrajectoryResult> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(run_gate(gate_config_for(cfg, i), psi0, i));
  return out;
}

}  // namespace qrd
