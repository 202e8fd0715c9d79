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

// Single-qubit depolarizing noise as three monitored channels L_k = sigma_k
// (dissipative) or L_k = i sigma_k (conserving), each with rate p/3.
//
// The forward solution is approximated by the second-order stochastic Magnus
// expansion. With A_k = sqrt(p/3) L_k the second-order term is
// sum_{i<j} [A_j, A_i] S_ij, which for the standard Pauli matrices gives
//   dissipative: exp(-p t + sum_k sigma_k (sqrt(p/3) W_k - i 2p/3 S_g(k)))
//   conserving:  exp(i sum_k sigma_k (sqrt(p/3) W_k + 2p/3 S_g(k)))
// where S_g(1) = S_23, S_g(2) = S_31, S_g(3) = S_12.
//
// The approximate reverse process drives three complex bridges X_k from
// X_k(T) (the Magnus coefficients above) to zero at 2T and integrates
//   d|phi> = (D dt + sum_k H_k dX_k)|phi>,  dX_k = -X_k/(2T - t) dt + gamma dW_k.

#pragma once

#include <optional>

#include "qrd/trajectory.hpp"

namespace qrd {

struct DepolarizingConfig {
  Mode mode = Mode::Dissipative;
  double p = 0.1;
  double T = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  ReverseNoise reverse_noise = ReverseNoise::Detector;

  std::size_t steps() const { return whole_steps(T, dt); }
  double channel_rate() const { return std::sqrt(p / 3.0); }

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise strength p must lie in [0, 1]");
    (void)steps();
  }

  /// The reverse construction is only accurate for pT < 1.
  void validate_reverse() const {
    validate();
    if (!(p * T < 1.0)) throw std::invalid_argument("depolarizing reverse requires pT < 1");
  }

  /// Bridge diffusion coefficient: sqrt(p/3) - 2ip/3 (dissipative),
  /// sqrt(p/3) + 2p/3 (conserving).
  cplx gamma() const {
    return mode == Mode::Dissipative ? cplx(channel_rate(), -2.0 * p / 3.0)
                                     : cplx(channel_rate() + 2.0 * p / 3.0, 0.0);
  }
};

using Triple = std::array<double, 3>;
using CTriple = std::array<cplx, 3>;

/// Three measurement increments for the current state.
inline Triple depol_measurement_increments(const QuantumState& state, const DepolarizingConfig& cfg,
                                           std::array<NoiseStream, 3>& streams) {
  Triple dw{};
  const auto axes = {Axis::X, Axis::Y, Axis::Z};
  int k = 0;
  for (Axis a : axes) {
    dw[k] = measurement_increment(state, PauliString({a}), cfg.mode, cfg.p / 3.0, cfg.dt, streams[k]);
    ++k;
  }
  return dw;
}

/// sum_k v_k sigma_k applied to a single-qubit vector.
inline Amplitudes apply_pauli_vector(const CTriple& v, const Amplitudes& a) {
  Amplitudes out(2);
  out[0] = v[2] * a[0] + (v[0] - kI * v[1]) * a[1];
  out[1] = (v[0] + kI * v[1]) * a[0] - v[2] * a[1];
  return out;
}

/// Euler-Maruyama step of the forward depolarizing SDE (sum_k L_k^dag L_k = 3I).
inline QuantumState forward_depol_step(QuantumState state, const DepolarizingConfig& cfg, const Triple& dw) {
  const double c = cfg.channel_rate();
  const cplx phase = cfg.mode == Mode::Dissipative ? cplx(1.0) : kI;
  const CTriple v{phase * c * dw[0], phase * c * dw[1], phase * c * dw[2]};
  const Amplitudes noise = apply_pauli_vector(v, state.amplitudes());
  state.amplitudes() = (1.0 - 0.5 * cfg.p * cfg.dt) * state.amplitudes() + noise;
  state.rescale();
  return state;
}

/// Coefficients X_k such that the Magnus-2 exponent at step n is
/// -p t + sum sigma_k X_k (dissipative) or i sum sigma_k X_k (conserving).
inline CTriple magnus2_coefficients(const MeasurementRecord& record, const DepolarizingConfig& cfg, std::size_t n) {
  if (record.channels() != 3) throw std::invalid_argument("Magnus-2 needs a three-channel record");
  const double c = cfg.channel_rate();
  const auto& s = record.areas(n);
  CTriple x{};
  for (std::size_t k = 0; k < 3; ++k) {
    const double w = record.W(k, n);
    x[k] = cfg.mode == Mode::Dissipative ? cplx(c * w, -2.0 * cfg.p / 3.0 * s[k])
                                         : cplx(c * w + 2.0 * cfg.p / 3.0 * s[k], 0.0);
  }
  return x;
}

inline std::size_t step_index(double t, double dt) {
  const double n = t / dt;
  const double r = std::round(n);
  if (r < 0.0 || std::abs(n - r) > 1e-6 * std::max(1.0, r))
    throw std::invalid_argument("time is not on the step grid");
  return static_cast<std::size_t>(r);
}

inline Operator magnus2_operator(const MeasurementRecord& record, const DepolarizingConfig& cfg, std::size_t n) {
  const CTriple x = magnus2_coefficients(record, cfg, n);
  const double t = static_cast<double>(n) * record.dt();
  if (cfg.mode == Mode::Dissipative) return exp_pauli_vector(-cfg.p * t, x);
  return exp_pauli_vector(0.0, {kI * x[0], kI * x[1], kI * x[2]});
}

/// Second-order Magnus approximation of the forward state at time t.
inline QuantumState magnus2_solution(const QuantumState& psi0, const MeasurementRecord& record,
                                     const DepolarizingConfig& cfg, double t) {
  const std::size_t n = step_index(t, record.dt());
  if (n > record.steps()) throw std::out_of_range("magnus2_solution: t beyond the record");
  return QuantumState(magnus2_operator(record, cfg, n) * psi0.amplitudes(), psi0.log_norm_offset());
}

//---------------------------------------------------------------------------//
// Reverse process
//---------------------------------------------------------------------------//

struct ReverseDriftState {
  std::array<BridgeState, 3> bridges;
  CTriple x_T{};
  cplx gamma{};

  CTriple displacement() const {
    return {bridges[0].x - x_T[0], bridges[1].x - x_T[1], bridges[2].x - x_T[2]};
  }
  double t() const { return bridges[0].t; }
};

/// Bridges pinned at zero at 2T, started from the Magnus coefficients of the
/// forward record at T.
inline ReverseDriftState reverse_drift_init(const MeasurementRecord& record_T, const DepolarizingConfig& cfg) {
  ReverseDriftState d;
  d.x_T = magnus2_coefficients(record_T, cfg, record_T.steps());
  d.gamma = cfg.gamma();
  for (std::size_t k = 0; k < 3; ++k) {
    d.bridges[k].x = d.x_T[k];
    d.bridges[k].t = cfg.T;
    d.bridges[k].t_end = 2.0 * cfg.T;
    d.bridges[k].x_end = 0.0;
    d.bridges[k].gamma = d.gamma;
  }
  return d;
}

/// Scalar drift D(t) of the reverse SDE.
inline cplx reverse_depol_scalar_drift(const DepolarizingConfig& cfg, const ReverseDriftState& drift) {
  const CTriple dx = drift.displacement();
  const cplx s2 = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
  const cplx g2 = drift.gamma * drift.gamma;
  if (cfg.mode == Mode::Dissipative) return -cfg.p + 0.5 * g2 * (3.0 - 2.0 * s2);
  return -0.5 * g2 * (3.0 + 2.0 * s2);
}

/// sum_k H_k dX_k as a Pauli vector. The commutator sum in H_k reduces with
/// [sigma_j, sigma_k] = 2i eps_jkl sigma_l to a cross product:
///   dissipative: dX + i (dX_disp x dX)
///   conserving:  i (dX - dX_disp x dX)
inline CTriple reverse_depol_noise_vector(Mode mode, const CTriple& disp, const CTriple& dX) {
  const CTriple cross{disp[1] * dX[2] - disp[2] * dX[1], disp[2] * dX[0] - disp[0] * dX[2],
                      disp[0] * dX[1] - disp[1] * dX[0]};
  CTriple v{};
  for (int l = 0; l < 3; ++l)
    v[l] = mode == Mode::Dissipative ? dX[l] + kI * cross[l] : kI * (dX[l] - cross[l]);
  return v;
}

inline std::pair<QuantumState, ReverseDriftState> reverse_depol_step(QuantumState state,
                                                                     const DepolarizingConfig& cfg,
                                                                     const ReverseDriftState& drift,
                                                                     const Triple& dw) {
  if (drift.bridges[0].t_end - drift.bridges[0].t < 0.5 * cfg.dt)
    throw std::out_of_range("reverse_depol_step: stepping past 2T");
  ReverseDriftState next = drift;
  CTriple dX{};
  for (std::size_t k = 0; k < 3; ++k) {
    next.bridges[k] = bridge_step(drift.bridges[k], dw[k], cfg.dt);
    dX[k] = next.bridges[k].x - drift.bridges[k].x;
  }
  const cplx D = reverse_depol_scalar_drift(cfg, drift);
  const CTriple v = reverse_depol_noise_vector(cfg.mode, drift.displacement(), dX);
  const Amplitudes noise = apply_pauli_vector(v, state.amplitudes());
  state.amplitudes() = (1.0 + D * cfg.dt) * state.amplitudes() + noise;
  state.rescale();
  return {std::move(state), next};
}

/// R2(t) = exp(-p(t - T) + sum sigma_k (X_k(t) - X_k(T))) (dissipative) or
/// exp(i sum sigma_k (X_k(t) - X_k(T))) (conserving).
inline Operator reverse_depol_propagator(const DepolarizingConfig& cfg, const ReverseDriftState& drift) {
  const CTriple d = drift.displacement();
  if (cfg.mode == Mode::Dissipative) return exp_pauli_vector(-cfg.p * (drift.t() - cfg.T), d);
  return exp_pauli_vector(0.0, {kI * d[0], kI * d[1], kI * d[2]});
}

/// Closed-form reverse state R2(t) F2(T)|psi0>. At t = 2T it equals
/// exp(-2pT)|psi0> (dissipative) or |psi0> (conserving).
inline QuantumState reverse_depol_oracle(const QuantumState& psi0, const MeasurementRecord& record_T,
                                         const DepolarizingConfig& cfg, const ReverseDriftState& drift) {
  const Operator F = magnus2_operator(record_T, cfg, record_T.steps());
  return QuantumState(reverse_depol_propagator(cfg, drift) * (F * psi0.amplitudes()));
}

//---------------------------------------------------------------------------//
// Drivers
//---------------------------------------------------------------------------//

inline std::array<NoiseStream, 3> depol_streams(std::uint64_t seed, std::uint64_t trajectory, std::uint32_t base) {
  return {NoiseStream(seed, trajectory, base + 0), NoiseStream(seed, trajectory, base + 1),
          NoiseStream(seed, trajectory, base + 2)};
}

inline TrajectoryResult run_depol_forward(const DepolarizingConfig& cfg, const QuantumState& psi0,
                                          std::uint64_t trajectory = 0) {
  cfg.validate();
  if (psi0.dim() != 2) throw std::invalid_argument("depolarizing engine is single-qubit");
  const std::size_t n = cfg.steps();
  auto streams = depol_streams(cfg.seed, trajectory, channel::kForward);
  TrajectoryResult res;
  res.t0 = 0.0;
  res.dt = cfg.dt;
  res.record = MeasurementRecord(3, cfg.dt);
  res.states.reserve(n + 1);
  res.states.push_back(psi0);
  QuantumState psi = psi0;
  for (std::size_t i = 0; i < n; ++i) {
    const Triple dw = depol_measurement_increments(psi, cfg, streams);
    res.record.append(dw);
    psi = forward_depol_step(std::move(psi), cfg, dw);
    res.states.push_back(psi);
  }
  res.terminal_fidelity = fidelity(psi, psi0);
  return res;
}

struct DepolReverseResult {
  TrajectoryResult trajectory;
  ReverseDriftState final_drift;
};

inline DepolReverseResult run_depol_reverse(const DepolarizingConfig& cfg, const QuantumState& psi_T,
                                            const MeasurementRecord& record_T,
                                            const std::optional<QuantumState>& psi0 = std::nullopt,
                                            std::uint64_t trajectory = 0) {
  cfg.validate_reverse();
  const std::size_t n = cfg.steps();
  auto streams = depol_streams(cfg.seed, trajectory, channel::kReverse);
  DepolReverseResult out;
  TrajectoryResult& res = out.trajectory;
  res.t0 = cfg.T;
  res.dt = cfg.dt;
  res.record = MeasurementRecord(3, cfg.dt);
  res.states.reserve(n + 1);
  QuantumState phi(psi_T.normalized());
  res.states.push_back(phi);
  ReverseDriftState drift = reverse_drift_init(record_T, cfg);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& b : drift.bridges) b.t = cfg.T + static_cast<double>(i) * cfg.dt;
    Triple dw{};
    if (cfg.reverse_noise == ReverseNoise::Innovation) {
      for (std::size_t k = 0; k < 3; ++k) dw[k] = wiener_increment(streams[k], cfg.dt);
    } else {
      dw = depol_measurement_increments(phi, cfg, streams);
    }
    res.record.append(dw);
    std::tie(phi, drift) = reverse_depol_step(std::move(phi), cfg, drift, dw);
    res.states.push_back(phi);
  }
  if (psi0) res.terminal_fidelity = fidelity(phi, *psi0);
  out.final_drift = drift;
  return out;
}

}  // namespace qrd
