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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qrd/depolarizing.hpp"

namespace qrd {
namespace {

DepolarizingConfig make_cfg(Mode mode, double p = 0.1, double T = 1.0, double dt = 1e-3, std::uint64_t seed = 1) {
  DepolarizingConfig c;
  c.mode = mode;
  c.p = p;
  c.T = T;
  c.dt = dt;
  c.seed = seed;
  return c;
}

Amplitudes reconstructed(const QuantumState& s) { return std::exp(s.log_norm_offset()) * s.amplitudes(); }

TEST(DepolarizingConfig, GammaAndValidation) {
  const auto d = make_cfg(Mode::Dissipative, 0.3);
  EXPECT_NEAR(std::abs(d.gamma() - cplx(std::sqrt(0.1), -0.2)), 0.0, 1e-15);
  const auto c = make_cfg(Mode::Conserving, 0.3);
  EXPECT_NEAR(std::abs(c.gamma() - cplx(std::sqrt(0.1) + 0.2, 0.0)), 0.0, 1e-15);
  EXPECT_THROW(make_cfg(Mode::Dissipative, 0.5, 2.0).validate_reverse(), std::invalid_argument);
  EXPECT_NO_THROW(make_cfg(Mode::Dissipative, 0.5, 1.0).validate_reverse());
}

TEST(ForwardDepolStep, MatchesDenseEulerUpdate) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg(m, 0.3, 1.0, 1e-2);
    NoiseStream s(1, 0, channel::kAux);
    const auto psi = random_state(1, s);
    const Triple dw{0.01, -0.03, 0.02};
    const auto ax = pauli_axes();
    const cplx ph = m == Mode::Dissipative ? cplx(1.0) : kI;
    // sum_k L_k^dag L_k = 3I at rate p/3, so the drift is -(p/2) I.
    Operator M = (1.0 - 0.5 * c.p * c.dt) * Operator::Identity(2, 2);
    for (int k = 0; k < 3; ++k) M += std::sqrt(c.p / 3.0) * dw[k] * ph * ax[k];
    EXPECT_LT((reconstructed(forward_depol_step(psi, c, dw)) - M * psi.amplitudes()).norm(), 1e-15);
  }
}

TEST(ForwardDepolStep, ZeroNoiseIsIdentity) {
  const auto c = make_cfg(Mode::Dissipative, 0.0);
  NoiseStream s(2, 0, channel::kAux);
  const auto psi = random_state(1, s);
  EXPECT_LT((reconstructed(forward_depol_step(psi, c, {0.1, 0.2, 0.3})) - psi.amplitudes()).norm(), 1e-15);
}

TEST(DepolMeasurement, SignalPerChannel) {
  const auto c = make_cfg(Mode::Dissipative, 0.3);
  auto streams = depol_streams(4, 0, channel::kForward);
  auto ref = depol_streams(4, 0, channel::kForward);
  const auto dw = depol_measurement_increments(QuantumState::basis(1, 0), c, streams);
  // <sigma_x> = <sigma_y> = 0, <sigma_z> = 1 on |0>.
  EXPECT_NEAR(dw[0], wiener_increment(ref[0], c.dt), 1e-16);
  EXPECT_NEAR(dw[1], wiener_increment(ref[1], c.dt), 1e-16);
  EXPECT_NEAR(dw[2], 2.0 * std::sqrt(0.1) * c.dt + wiener_increment(ref[2], c.dt), 1e-16);
}

TEST(Magnus2, CoefficientsFromRecord) {
  const auto c = make_cfg(Mode::Dissipative, 0.3);
  MeasurementRecord r(3, c.dt);
  r.append(std::array<double, 3>{0.1, 0.0, 0.0});
  r.append(std::array<double, 3>{0.0, 0.1, 0.0});
  const auto x = magnus2_coefficients(r, c, 2);
  const double s12 = r.area(0, 1, 2);
  EXPECT_NEAR(s12, 0.005, 1e-15);
  EXPECT_LT(std::abs(x[0] - cplx(std::sqrt(0.1) * 0.1, 0.0)), 1e-15);
  EXPECT_LT(std::abs(x[1] - cplx(std::sqrt(0.1) * 0.1, 0.0)), 1e-15);
  EXPECT_LT(std::abs(x[2] - cplx(0.0, -0.2 * s12)), 1e-15);
  const auto cc = make_cfg(Mode::Conserving, 0.3);
  EXPECT_LT(std::abs(magnus2_coefficients(r, cc, 2)[2] - cplx(0.2 * s12, 0.0)), 1e-15);
}

TEST(Magnus2, InitialTimeIsIdentity) {
  const auto c = make_cfg(Mode::Dissipative);
  NoiseStream s(3, 0, channel::kAux);
  const auto psi = random_state(1, s);
  const auto res = run_depol_forward(c, psi);
  EXPECT_LT((reconstructed(magnus2_solution(psi, res.record, c, 0.0)) - psi.amplitudes()).norm(), 1e-15);
  EXPECT_THROW(magnus2_solution(psi, res.record, c, 0.0005), std::invalid_argument);
  EXPECT_THROW(magnus2_solution(psi, res.record, c, 2.0), std::out_of_range);
}

TEST(Magnus2, SecondOrderTermMatchesCommutatorSum) {
  // Omega_2 = sum_{i<j} [A_j, A_i] S_ij with A_k = sqrt(p/3) L_k.
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg(m, 0.3);
    NoiseStream s(5, 0, channel::kAux);
    MeasurementRecord r(3, c.dt);
    for (int i = 0; i < 50; ++i)
      r.append(std::array<double, 3>{wiener_increment(s, c.dt), wiener_increment(s, c.dt), wiener_increment(s, c.dt)});
    const auto ax = pauli_axes();
    const cplx ph = m == Mode::Dissipative ? cplx(1.0) : kI;
    const double t = 50 * c.dt;
    Operator omega = (m == Mode::Dissipative ? -c.p * t : 0.0) * Operator::Identity(2, 2);
    std::array<Operator, 3> A;
    for (int k = 0; k < 3; ++k) {
      A[k] = std::sqrt(c.p / 3.0) * ph * ax[k];
      omega += A[k] * r.W(k, 50);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) omega += (A[j] * A[i] - A[i] * A[j]) * r.area(i, j, 50);
    EXPECT_LT(oracle::max_abs_diff(magnus2_operator(r, c, 50), oracle::taylor_expm(omega)), 1e-13);
  }
}

// The second-order term must reduce the error against a fine Euler-Maruyama
// reference; flipping its sign must make it worse.
TEST(Magnus2, CorrectSignBeatsFlippedSign) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg(m, 0.1, 1.0, 1e-5, 31);
    const double t = 0.5;
    const auto n = static_cast<std::size_t>(std::lround(t / c.dt));
    double err_good = 0.0, err_flip = 0.0, err_first = 0.0;
    const int paths = 30;
    for (int k = 0; k < paths; ++k) {
      NoiseStream s(c.seed, k, channel::kInitial);
      const auto psi0 = random_state(1, s);
      auto streams = depol_streams(c.seed, k, channel::kForward);
      MeasurementRecord r(3, c.dt);
      QuantumState psi = psi0;
      for (std::size_t i = 0; i < n; ++i) {
        const Triple dw = depol_measurement_increments(psi, c, streams);
        r.append(dw);
        psi = forward_depol_step(std::move(psi), c, dw);
      }
      const Amplitudes ref = psi.normalized();
      const auto good = magnus2_coefficients(r, c, n);
      std::array<cplx, 3> flip{}, first{};
      for (int j = 0; j < 3; ++j) {
        const double w = std::sqrt(c.p / 3.0) * r.W(j, n);
        flip[j] = 2.0 * w - good[j];
        first[j] = w;
      }
      auto state = [&](const std::array<cplx, 3>& x) {
        const cplx ph = m == Mode::Dissipative ? cplx(1.0) : kI;
        const Amplitudes v = exp_pauli_vector(0.0, {ph * x[0], ph * x[1], ph * x[2]}) * psi0.amplitudes();
        return Amplitudes(v / v.norm());
      };
      auto dist2 = [&](const Amplitudes& a) { return 1.0 - std::pow(std::abs(a.dot(ref)), 2); };
      err_good += dist2(state(good));
      err_flip += dist2(state(flip));
      err_first += dist2(state(first));
    }
    EXPECT_LT(err_good * 3.0, err_flip) << to_string(m);
    EXPECT_LT(err_good * 3.0, err_first) << to_string(m);
  }
}

TEST(ReverseDrift, InitialisedFromMagnusCoefficients) {
  const auto c = make_cfg(Mode::Dissipative, 0.2);
  NoiseStream s(6, 0, channel::kAux);
  const auto fwd = run_depol_forward(c, random_state(1, s));
  const auto d = reverse_drift_init(fwd.record, c);
  const auto x = magnus2_coefficients(fwd.record, c, fwd.record.steps());
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(d.bridges[k].x, x[k]);
    EXPECT_EQ(d.bridges[k].t, c.T);
    EXPECT_EQ(d.bridges[k].t_end, 2.0 * c.T);
    EXPECT_EQ(d.bridges[k].x_end, cplx(0.0));
    EXPECT_EQ(d.bridges[k].gamma, c.gamma());
  }
  for (const auto& v : d.displacement()) EXPECT_EQ(v, cplx(0.0));
}

TEST(ReverseDrift, NoiseVectorMatchesDenseCommutators) {
  // H_k = L_k + (1/2) sum_j [L_j, L_k] DeltaX_j, summed against dX_k.
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    NoiseStream s(7, 0, channel::kAux);
    CTriple disp{}, dX{};
    for (auto& v : disp) v = cplx(s.normal(), s.normal());
    for (auto& v : dX) v = cplx(s.normal(), s.normal()) * 0.01;
    const auto ax = pauli_axes();
    const cplx ph = m == Mode::Dissipative ? cplx(1.0) : kI;
    Operator dense = Operator::Zero(2, 2);
    for (int k = 0; k < 3; ++k) {
      Operator Hk = ph * ax[k];
      for (int j = 0; j < 3; ++j) Hk += 0.5 * ph * ph * (ax[j] * ax[k] - ax[k] * ax[j]) * disp[j];
      dense += Hk * dX[k];
    }
    const auto v = reverse_depol_noise_vector(m, disp, dX);
    Operator got = Operator::Zero(2, 2);
    for (int l = 0; l < 3; ++l) got += v[l] * ax[l];
    EXPECT_LT(oracle::max_abs_diff(got, dense), 1e-14) << to_string(m);
  }
}

TEST(ReverseDrift, PropagatorCancelsForwardAtEnd) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg(m, 0.2, 1.0, 1e-3, 8);
    NoiseStream s(8, 0, channel::kAux);
    const auto psi = random_state(1, s);
    const auto fwd = run_depol_forward(c, psi);
    auto d = reverse_drift_init(fwd.record, c);
    for (auto& b : d.bridges) {
      b.x = 0.0;
      b.t = b.t_end;
    }
    const auto out = reverse_depol_oracle(psi, fwd.record, c, d);
    const double scale = m == Mode::Dissipative ? std::exp(-2.0 * c.p * c.T) : 1.0;
    EXPECT_LT((reconstructed(out) - scale * psi.amplitudes()).norm(), 1e-12);
  }
}

TEST(ReverseDepolStep, RefusesToStepPastEnd) {
  const auto c = make_cfg(Mode::Dissipative, 0.2);
  MeasurementRecord r(3, c.dt);
  r.append(std::array<double, 3>{0.0, 0.0, 0.0});
  auto d = reverse_drift_init(r, c);
  for (auto& b : d.bridges) b.t = b.t_end;
  EXPECT_THROW(reverse_depol_step(QuantumState::basis(1, 0), c, d, {0.0, 0.0, 0.0}), std::out_of_range);
}

TEST(ReverseDepolStep, TracksClosedFormPropagator) {
  // Along one reverse path the integrated state stays close to R2(t) phi(T).
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg(m, 0.1, 1.0, 1e-4, 9);
    NoiseStream s(9, 0, channel::kAux);
    const auto psi0 = random_state(1, s);
    const auto fwd = run_depol_forward(c, psi0);
    const QuantumState phiT(fwd.terminal().normalized());
    auto drift = reverse_drift_init(fwd.record, c);
    auto streams = depol_streams(c.seed, 0, channel::kReverse);
    QuantumState phi = phiT;
    double worst = 1.0;
    for (std::size_t i = 0; i < c.steps(); ++i) {
      for (auto& b : drift.bridges) b.t = c.T + static_cast<double>(i) * c.dt;
      const Triple dw = depol_measurement_increments(phi, c, streams);
      std::tie(phi, drift) = reverse_depol_step(std::move(phi), c, drift, dw);
      if ((i + 1) % 1000 == 0) {
        const Amplitudes ref = reverse_depol_propagator(c, drift) * phiT.amplitudes();
        worst = std::min(worst, fidelity(phi.amplitudes(), ref));
      }
    }
    EXPECT_GT(worst, 0.999) << to_string(m);
    for (const auto& b : drift.bridges) EXPECT_EQ(b.x, cplx(0.0));
  }
}

TEST(RunDepolReverse, HighFidelityForSmallNoise) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    double sum = 0.0;
    const int n = 20;
    for (int k = 0; k < n; ++k) {
      const auto c = make_cfg(m, 0.05, 1.0, 1e-3, 10);
      NoiseStream s(10, k, channel::kInitial);
      const auto psi0 = random_state(1, s);
      const auto fwd = run_depol_forward(c, psi0, k);
      const auto rev = run_depol_reverse(c, fwd.terminal(), fwd.record, psi0, k);
      EXPECT_EQ(rev.trajectory.states.size(), c.steps() + 1);
      sum += *rev.trajectory.terminal_fidelity;
    }
    EXPECT_GT(sum / n, 0.995) << to_string(m);
  }
}

TEST(RunDepolReverse, RejectsLargeNoiseHorizon) {
  const auto c = make_cfg(Mode::Dissipative, 0.6, 2.0, 1e-2);
  const auto fwd = run_depol_forward(c, QuantumState::basis(1, 0));
  EXPECT_THROW(run_depol_reverse(c, fwd.terminal(), fwd.record), std::invalid_argument);
}

}  // namespace
}  // namespace qrd
