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

#include <numbers>

#include "oracles.hpp"
#include "qrd/gate.hpp"
#include "qrd/pauli_channel.hpp"
#include "qrd/stats.hpp"

namespace qrd {
namespace {

GateConfig make_cfg(double theta, const char* word, double p = 0.2, double T = 1.0, double dt = 1e-3,
                    std::uint64_t seed = 1) {
  GateConfig g;
  g.theta = theta;
  g.P = PauliString::parse(word);
  g.p = p;
  g.T = T;
  g.dt = dt;
  g.seed = seed;
  return g;
}

double z_expectation(const QuantumState& s) {
  const Amplitudes v = s.normalized();
  return std::norm(v[0]) - std::norm(v[1]);
}

TEST(GateOperator, ClosedForm) {
  const auto P = PauliString::parse("ZX");
  const double th = 0.7;
  const Operator expect = std::cos(th) * Operator::Identity(4, 4) - kI * std::sin(th) * pauli_matrix(P);
  EXPECT_LT(oracle::max_abs_diff(gate_operator(th, P), expect), 1e-15);
}

TEST(GateConfig, RejectsZeroNoise) {
  const auto g = make_cfg(1.0, "X", 0.0);
  EXPECT_THROW(g.validate(), std::invalid_argument);
  EXPECT_THROW(run_gate(g, QuantumState::basis(1, 0)), std::invalid_argument);
}

TEST(RunGate, ZeroAngleNoiselessPathIsIdentity) {
  const auto g = make_cfg(0.0, "X");
  NoiseStream s(1, 0, channel::kAux);
  const auto psi0 = random_state(1, s);
  QuantumState psi = psi0;
  BridgeState b = gate_bridge(g);
  for (std::size_t i = 0; i < g.steps(); ++i) {
    b.t = g.T + static_cast<double>(i) * g.dt;
    std::tie(psi, b) = gate_step_exact(psi, g, b, 0.0);
  }
  EXPECT_NEAR(fidelity(psi, psi0), 1.0, 1e-15);
}

TEST(RunGate, QuarterTurnFlipsBasisState) {
  const auto g = make_cfg(std::numbers::pi / 2, "X", 0.2, 1.0, 1e-3, 3);
  const auto res = run_gate(g, QuantumState::basis(1, 0));
  const Amplitudes v = res.terminal().normalized();
  EXPECT_NEAR(std::abs(v[1]), 1.0, 1e-10);
  EXPECT_NEAR(*res.terminal_fidelity, 1.0, 1e-10);
}

TEST(RunGate, ExactSteppingIsDeterministicForEverySeed) {
  for (const char* w : {"X", "Y", "ZX", "YY"}) {
    for (double th : {std::numbers::pi / 4, 1.0, 2.5}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto g = make_cfg(th, w, 0.2, 1.0, 1e-3, seed);
        NoiseStream s(seed, 0, channel::kInitial);
        const auto psi0 = random_state(g.P.qubits(), s);
        const auto res = run_gate(g, psi0);
        EXPECT_GE(*res.terminal_fidelity, 1.0 - 1e-9) << w << " " << th << " " << seed;
        for (const auto& st : res.states) ASSERT_NEAR(st.norm(), 1.0, 1e-12);
        EXPECT_EQ(res.states.size(), g.steps() + 1);
      }
    }
  }
}

TEST(RunGate, EulerMaruyamaApproachesTarget) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto g = make_cfg(1.0, "X", 0.2, 1.0, 1e-4, seed);
    g.stepper = Stepper::EulerMaruyama;
    const auto res = run_gate(g, QuantumState::basis(1, 0));
    EXPECT_GE(*res.terminal_fidelity, 1.0 - 1e-2);
  }
}

TEST(RunGate, ReportsDriftStrength) {
  const auto slow = run_gate(make_cfg(1.0, "X", 0.2, 1.0, 1e-3, 4), QuantumState::basis(1, 0));
  const auto fast = run_gate(make_cfg(1.0, "X", 0.2, 0.1, 1e-4, 4), QuantumState::basis(1, 0));
  EXPECT_TRUE(std::isfinite(slow.max_drift_strength));
  // At t = T the drift is theta / T, so a shorter window needs a stronger drive.
  EXPECT_GE(slow.max_drift_strength, 1.0 - 1e-12);
  EXPECT_GE(fast.max_drift_strength, 10.0 - 1e-9);
}

TEST(RunGate, ShiftedBridgeMatchesReverseDrift) {
  // Y = theta/sqrt(p) + X turns the gate drift into the conserving reverse drift.
  const auto g = make_cfg(0.9, "XZ", 0.3);
  ChannelConfig c;
  c.P = g.P;
  c.mode = Mode::Conserving;
  c.p = g.p;
  c.T = g.T;
  c.dt = g.dt;
  NoiseStream s(5, 0, channel::kAux);
  const auto psi = random_state(2, s);
  BridgeState gb = gate_bridge(g);
  gb.t = 1.37;
  gb.x = 0.42;
  BridgeState rb = reverse_bridge(c, 0.42 - g.x_end());
  rb.t = 1.37;
  const double dw = 0.021;
  const auto [a, an] = gate_step_em(psi, g, gb, dw);
  const auto [b, bn] = reverse_step_em(psi, c, rb, dw);
  EXPECT_LT((a.amplitudes() - b.amplitudes()).norm(), 1e-15);
  EXPECT_NEAR((an.x - an.x_end).real(), bn.x.real(), 1e-14);
}

TEST(RunGate, TerminalBridgeIsPinned) {
  const auto g = make_cfg(1.3, "Y", 0.2, 1.0, 1e-3, 6);
  QuantumState psi = QuantumState::basis(1, 0);
  BridgeState b = gate_bridge(g);
  NoiseStream st(6, 0, channel::kReverse);
  for (std::size_t i = 0; i < g.steps(); ++i) {
    b.t = g.T + static_cast<double>(i) * g.dt;
    std::tie(psi, b) = gate_step_exact(psi, g, b, wiener_increment(st, g.dt));
  }
  EXPECT_EQ(b.x, cplx(g.x_end()));
}

TEST(RunGateManifold, PointMassMatchesSingleRun) {
  auto g = make_cfg(0.8, "X", 0.2, 1.0, 1e-3, 7);
  g.theta_sampler = ThetaSampler::point(0.8);
  const auto psi0 = QuantumState::basis(1, 0);
  const auto runs = run_gate_manifold(g, psi0, 3);
  ASSERT_EQ(runs.size(), 3u);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto single = run_gate(g, psi0, i);
    EXPECT_EQ(*runs[i].theta, 0.8);
    EXPECT_EQ(runs[i].terminal().amplitudes(), single.terminal().amplitudes());
  }
}

TEST(RunGateManifold, UniformAnglePushforwardMatchesDirectSampling) {
  auto g = make_cfg(0.0, "X", 0.2, 1.0, 1e-2, 8);
  g.theta_sampler = ThetaSampler::uniform(0.0, std::numbers::pi);
  const auto runs = run_gate_manifold(g, QuantumState::basis(1, 0), 1000);
  std::vector<double> sim, direct;
  NoiseStream ds(999, 0, channel::kAux);
  for (const auto& r : runs) {
    EXPECT_GE(*r.terminal_fidelity, 1.0 - 1e-9);
    sim.push_back(z_expectation(r.terminal()));
    direct.push_back(std::cos(2.0 * std::numbers::pi * ds.uniform()));
  }
  const auto ks = ks_two_sample(sim, direct, 0.01);
  EXPECT_FALSE(ks.reject) << "D=" << ks.statistic << " p=" << ks.p_value;
}

TEST(RunGateManifold, HalvingTheWindowKeepsTheDistribution) {
  auto a = make_cfg(0.0, "X", 0.2, 1.0, 1e-2, 9);
  auto b = make_cfg(0.0, "X", 0.2, 0.5, 5e-3, 10);
  a.theta_sampler = b.theta_sampler = ThetaSampler::uniform(0.0, 1.5);
  std::vector<double> za, zb;
  for (const auto& r : run_gate_manifold(a, QuantumState::basis(1, 0), 800)) za.push_back(z_expectation(r.terminal()));
  for (const auto& r : run_gate_manifold(b, QuantumState::basis(1, 0), 800)) zb.push_back(z_expectation(r.terminal()));
  EXPECT_FALSE(ks_two_sample(za, zb, 0.01).reject);
}

}  // namespace
}  // namespace qrd
