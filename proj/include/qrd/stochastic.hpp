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

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qrd/core.hpp"

namespace qrd {

//---------------------------------------------------------------------------//
// Counter-based randomness
//---------------------------------------------------------------------------//

/// Channel identifiers. Forward and reverse segments never share a stream.
namespace channel {
inline constexpr std::uint32_t kForward = 0;     // + k for channel k
inline constexpr std::uint32_t kReverse = 16;    // + k
inline constexpr std::uint32_t kTeleport = 32;   // Bell outcome sampling
inline constexpr std::uint32_t kTheta = 48;      // gate angle sampler
inline constexpr std::uint32_t kInitial = 56;    // random initial states
inline constexpr std::uint32_t kAux = 60;        // test/experiment helpers
}  // namespace channel

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream of draws keyed by (seed, trajectory, channel). Draw n is
/// a pure function of the key and n, so replay does not depend on scheduling.
class NoiseStream {
 public:
  NoiseStream() = default;
  NoiseStream(std::uint64_t seed, std::uint64_t trajectory, std::uint32_t channel,
              std::uint64_t position = 0)
      : seed_(seed), trajectory_(trajectory), channel_(channel), position_(position) {
    key_ = splitmix64(splitmix64(splitmix64(seed_) ^ trajectory_) ^ (std::uint64_t{channel_} << 32));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t trajectory() const { return trajectory_; }
  std::uint32_t channel() const { return channel_; }
  std::uint64_t position() const { return position_; }

  /// Raw 64 bits for (key, position, lane); does not advance.
  std::uint64_t bits_at(std::uint64_t position, std::uint64_t lane) const {
    return splitmix64(splitmix64(key_ ^ (position * 0xd1b54a32d192ed03ULL)) + lane);
  }

  /// Uniform in (0, 1); advances.
  double uniform() { return to_open_unit(bits_at(position_++, 0)); }

  /// Standard normal via Box-Muller on two lanes of one counter; advances.
  double normal() {
    const double u1 = to_open_unit(bits_at(position_, 0));
    const double u2 = to_open_unit(bits_at(position_, 1));
    ++position_;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static double to_open_unit(std::uint64_t b) {
    return (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_ = 0;
  std::uint64_t trajectory_ = 0;
  std::uint32_t channel_ = 0;
  std::uint64_t position_ = 0;
  std::uint64_t key_ = 0;
};

/// Haar-random pure state on m qubits.
inline QuantumState random_state(std::size_t qubits, NoiseStream& stream) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  Amplitudes a(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double re = stream.normal();
    const double im = stream.normal();
    a[i] = cplx(re, im);
  }
  return QuantumState(a / a.norm());
}

//---------------------------------------------------------------------------//
// Increments
//---------------------------------------------------------------------------//

inline double wiener_increment(NoiseStream& stream, double dt) {
  if (dt < 0.0) throw std::invalid_argument("wiener_increment: dt must be non-negative");
  return std::sqrt(dt) * stream.normal();
}

/// Observed record increment dW = sqrt(p) <L + L^dag> dt + dW_hat.
inline double measurement_increment(const QuantumState& state, const Operator& L, double p,
                                    double dt, NoiseStream& stream) {
  const Amplitudes v = state.normalized();
  const double signal = (v.dot((L + L.adjoint()) * v)).real();
  return std::sqrt(p) * signal * dt + wiener_increment(stream, dt);
}

/// Same increment for L = P (dissipative) or L = iP (conserving) without
/// forming dense matrices. Conserving mode has L + L^dag = 0.
inline double measurement_increment(const QuantumState& state, const PauliString& P, Mode mode,
                                    double p, double dt, NoiseStream& stream) {
  double signal = 0.0;
  if (mode == Mode::Dissipative) {
    const Amplitudes& a = state.amplitudes();
    const double n2 = a.squaredNorm();
    if (!(n2 > 0.0)) throw std::domain_error("measurement_increment: zero-norm state");
    signal = 2.0 * P.expectation(a).real() / n2;
  }
  return std::sqrt(p) * signal * dt + wiener_increment(stream, dt);
}

//---------------------------------------------------------------------------//
// Measurement record with Levy areas
//---------------------------------------------------------------------------//

/// Observed increments per channel, their running sums W_k, and (for three
/// channels) the Levy areas S_23, S_31, S_12 sampled at every step.
class MeasurementRecord {
 public:
  MeasurementRecord() = default;
  MeasurementRecord(std::size_t channels, double dt) : dt_(dt), increments_(channels), cumulative_(channels) {
    if (channels == 0) throw std::invalid_argument("record needs at least one channel");
    for (auto& c : cumulative_) c.push_back(0.0);
    areas_.push_back({0.0, 0.0, 0.0});
  }

  double dt() const { return dt_; }
  std::size_t channels() const { return increments_.size(); }
  std::size_t steps() const { return increments_.empty() ? 0 : increments_[0].size(); }

  const std::vector<double>& increments(std::size_t k) const { return increments_.at(k); }
  const std::vector<double>& cumulative(std::size_t k) const { return cumulative_.at(k); }

  /// W_k after n steps.
  double W(std::size_t k, std::size_t n) const { return cumulative_.at(k).at(n); }
  double W(std::size_t k) const { return cumulative_.at(k).back(); }

  /// Levy areas after n steps, ordered by the axis they multiply:
  /// {S_23, S_31, S_12}.
  const std::array<double, 3>& areas(std::size_t n) const { return areas_.at(n); }
  const std::array<double, 3>& areas() const { return areas_.back(); }

  /// S_ij with S_ji = -S_ij, S_ii = 0 (0-based channel indices).
  double area(int i, int j, std::size_t n) const {
    if (i == j) return 0.0;
    const int k = 3 - i - j;  // the axis multiplying S_ij
    const double s = areas_.at(n)[static_cast<std::size_t>(k)];
    return levi_civita(i, j, k) * s;
  }
  double area(int i, int j) const { return area(i, j, areas_.size() - 1); }

  /// Left-point (Ito) update: areas use the pre-step W, then W += dW.
  void append(std::span<const double> dw) {
    if (dw.size() != channels()) throw std::invalid_argument("record append: channel count mismatch");
    if (channels() == 3) {
      const double w1 = W(0), w2 = W(1), w3 = W(2);
      auto s = areas_.back();
      s[0] += 0.5 * (w2 * dw[2] - w3 * dw[1]);
      s[1] += 0.5 * (w3 * dw[0] - w1 * dw[2]);
      s[2] += 0.5 * (w1 * dw[1] - w2 * dw[0]);
      areas_.push_back(s);
    } else {
      areas_.push_back({0.0, 0.0, 0.0});
    }
    for (std::size_t k = 0; k < channels(); ++k) {
      increments_[k].push_back(dw[k]);
      cumulative_[k].push_back(cumulative_[k].back() + dw[k]);
    }
  }

  /// Rebuild from raw increments (used when reading persisted records).
  static MeasurementRecord from_increments(double dt, const std::vector<std::vector<double>>& inc) {
    MeasurementRecord r(inc.size(), dt);
    const std::size_t n = inc.empty() ? 0 : inc[0].size();
    std::vector<double> step(inc.size());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < inc.size(); ++k) step[k] = inc[k].at(i);
      r.append(step);
    }
    return r;
  }

 private:
  double dt_ = 0.0;
  std::vector<std::vector<double>> increments_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<std::array<double, 3>> areas_;
};

inline MeasurementRecord& levy_update(MeasurementRecord& record, std::span<const double> dw) {
  record.append(dw);
  return record;
}

//---------------------------------------------------------------------------//
// Brownian bridge
//---------------------------------------------------------------------------//

/// Scalar bridge dX = -(X - x_end)/(t_end - t) dt + gamma dW pinned at t_end.
struct BridgeState {
  cplx x{};
  double t = 0.0;
  double t_end = 0.0;
  cplx x_end{};
  cplx gamma{1.0, 0.0};

  bool finished() const { return t >= t_end; }
};

/// One explicit Euler step. The step that lands on t_end (within half a step)
/// sets x = x_end exactly instead of evaluating the singular drift.
inline BridgeState bridge_step(BridgeState b, double dw, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("bridge_step: dt must be positive");
  const double remaining = b.t_end - b.t;
  if (remaining < 0.5 * dt) throw std::out_of_range("bridge_step: stepping past the pin time");
  if (std::abs(remaining - dt) <= 0.5 * dt) {
    b.x = b.x_end;
    b.t = b.t_end;
    return b;
  }
  b.x = b.x - (b.x - b.x_end) * (dt / remaining) + b.gamma * dw;
  b.t += dt;
  return b;
}

}  // namespace qrd
