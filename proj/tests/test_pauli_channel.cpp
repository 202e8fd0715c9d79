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
#include "qrd/pauli_channel.hpp"

namespace qrd {
namespace {

ChannelConfig make_cfg(const char* word, Mode mode, double p = 0.2, double T = 1.0, double dt = 1e-3,
                       std::uint64_t seed = 1) {
  ChannelConfig c;
  c.P = PauliString::parse(word);
  c.mode = mode;
  c.p = p;
  c.T = T;
  c.dt = dt;
  c.seed = seed;
  return c;
}

Amplitudes reconstructed(const QuantumState& s) { return std::exp(s.log_norm_offset()) * s.amplitudes(); }

TEST(ChannelConfig, Validation) {
  auto c = make_cfg("X", Mode::Dissipative);
  EXPECT_NO_THROW(c.validate());
  c.p = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.p = 0.2;
  c.dt = 0.3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ForwardStepEm, ZeroNoiseLeavesStateUnchanged) {
  const auto c = make_cfg("X", Mode::Dissipative, 0.0);
  NoiseStream s(1, 0, channel::kAux);
  const auto psi = random_state(1, s);
  const auto next = forward_step_em(psi, c, 0.37);
  EXPECT_LT((reconstructed(next) - psi.amplitudes()).norm(), 1e-15);
}

TEST(ForwardStepEm, ZeroIncrementContracts) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg("ZY", m, 0.3, 1.0, 1e-2);
    NoiseStream s(2, 0, channel::kAux);
    const auto psi = random_state(2, s);
    const auto next = forward_step_em(psi, c, 0.0);
    EXPECT_LT((reconstructed(next) - (1.0 - 0.3 * 1e-2 / 2.0) * psi.amplitudes()).norm(), 1e-15);
  }
}

TEST(ForwardStepEm, ConservingNormChangeIsOrderDt) {
  const double p = 0.2, dt = 1e-3, dw = std::sqrt(dt);
  const auto c = make_cfg("X", Mode::Conserving, p, 1.0, dt);
  NoiseStream s(3, 0, channel::kAux);
  const auto psi = random_state(1, s);
  const auto em = forward_step_em(psi, c, dw);
  const auto ex = forward_step_exact(psi, c, dw);
  // (a + i b P) on a unit vector with real a, b has norm sqrt(a^2 + b^2).
  const double a = 1.0 - p * dt / 2.0, b = std::sqrt(p) * dw;
  EXPECT_NEAR(em.norm(), std::sqrt(a * a + b * b), 1e-14);
  EXPECT_NEAR(ex.norm(), 1.0, 1e-14);
  EXPECT_LT(std::abs(em.norm() - 1.0), 5.0 * p * dt);
  EXPECT_LT((reconstructed(em) - reconstructed(ex)).norm(), 5.0 * p * dt);
}

TEST(ForwardExact, ZeroRecordOnlyScales) {
  const auto c = make_cfg("X", Mode::Dissipative);
  NoiseStream s(4, 0, channel::kAux);
  const auto psi = random_state(1, s);
  const auto out = forward_exact(psi, c, 0.0, 0.7);
  EXPECT_LT((reconstructed(out) - std::exp(-0.2 * 0.7) * psi.amplitudes()).norm(), 1e-15);
  EXPECT_NEAR(fidelity(out, psi), 1.0, 1e-15);
}

TEST(ForwardExact, SigmaXExample) {
  const auto c = make_cfg("X", Mode::Dissipative, 0.2);
  const auto out = forward_exact(QuantumState::basis(1, 0), c, 1.0, 1.0);
  const Amplitudes v = out.normalized();
  const double sp = std::sqrt(0.2);
  const double n = std::hypot(std::cosh(sp), std::sinh(sp));
  EXPECT_NEAR(v[0].real(), std::cosh(sp) / n, 1e-14);
  EXPECT_NEAR(v[1].real(), std::sinh(sp) / n, 1e-14);
  EXPECT_NEAR((v[1] / v[0]).real(), std::tanh(sp), 1e-14);
  // Unnormalized magnitude carries exp(-pt).
  EXPECT_NEAR(out.log_norm(), -0.2 + std::log(n), 1e-13);
}

TEST(ForwardExact, ConservingPreservesNorm) {
  const auto c = make_cfg("XZ", Mode::Conserving, 0.9);
  NoiseStream s(5, 0, channel::kAux);
  const auto psi = random_state(2, s);
  for (double W : {-3.0, 0.1, 2.5, 40.0}) EXPECT_NEAR(forward_exact(psi, c, W, 1.0).norm(), 1.0, 1e-13);
}

TEST(ForwardExact, MatchesTaylorExponential) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg("YX", m, 0.35);
    NoiseStream s(6, 0, channel::kAux);
    const auto psi = random_state(2, s);
    const double W = 0.83, t = 0.6;
    const Operator L = c.jump_operator();
    const Operator gen = (m == Mode::Dissipative ? -c.p * t : 0.0) * Operator::Identity(4, 4) + std::sqrt(c.p) * W * L;
    const Amplitudes ref = oracle::taylor_expm(gen) * psi.amplitudes();
    EXPECT_LT((reconstructed(forward_exact(psi, c, W, t)) - ref).norm(), 1e-12);
  }
}

TEST(RunForward, ZeroNoiseKeepsInitialState) {
  auto c = make_cfg("X", Mode::Dissipative, 0.0);
  const auto psi = QuantumState::basis(1, 0);
  for (Stepper st : {Stepper::Exact, Stepper::EulerMaruyama}) {
    c.stepper = st;
    const auto res = run_forward(c, psi);
    EXPECT_EQ(res.states.size(), c.steps() + 1);
    for (const auto& s : res.states) EXPECT_NEAR(fidelity(s, psi), 1.0, 1e-15);
  }
}

TEST(RunForward, ExactSteppingMatchesClosedForm) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    for (const char* w : {"X", "Y", "ZX"}) {
      const auto c = make_cfg(w, m, 0.2, 1.0, 1e-3, 17);
      NoiseStream s(7, 0, channel::kInitial);
      const auto psi = random_state(c.P.qubits(), s);
      const auto res = run_forward(c, psi);
      const auto ref = forward_exact(psi, c, res.record.W(0), c.T);
      const Amplitudes a = reconstructed(res.terminal()), b = reconstructed(ref);
      EXPECT_LT((a - b).norm() / b.norm(), 1e-10) << w;
      EXPECT_NEAR(res.terminal().log_norm(), ref.log_norm(), 1e-10);
    }
  }
}

TEST(RunForward, EulerMaruyamaConvergesToClosedForm) {
  auto strong_error = [](double dt) {
    double sum = 0.0;
    const int paths = 40;
    for (int k = 0; k < paths; ++k) {
      auto c = make_cfg("X", Mode::Dissipative, 0.2, 1.0, dt, 99);
      c.stepper = Stepper::EulerMaruyama;
      const auto psi = QuantumState::basis(1, 0);
      const auto res = run_forward(c, psi, k);
      const auto ref = forward_exact(psi, c, res.record.W(0), c.T);
      sum += (res.terminal().normalized() - ref.normalized()).squaredNorm();
    }
    return std::sqrt(sum / paths);
  };
  const double e2 = strong_error(1e-2), e3 = strong_error(1e-3);
  EXPECT_LT(e3, e2);
  EXPECT_GT(std::log10(e2 / e3), 0.45);
}

TEST(RunForward, RecordsObservedIncrements) {
  const auto c = make_cfg("Z", Mode::Dissipative, 0.2, 0.1, 1e-3, 5);
  const auto res = run_forward(c, QuantumState::basis(1, 0));
  // On |0> the exact forward state stays |0>, so every increment carries 2 sqrt(p) dt.
  NoiseStream ref(5, 0, channel::kForward);
  for (std::size_t i = 0; i < c.steps(); ++i)
    EXPECT_NEAR(res.record.increments(0)[i], 2.0 * std::sqrt(0.2) * 1e-3 + wiener_increment(ref, 1e-3), 1e-15);
}

TEST(ReverseStepEm, ZeroBridgeReducesToForwardStep) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg("Y", m);
    NoiseStream s(8, 0, channel::kAux);
    const auto psi = random_state(1, s);
    BridgeState b = reverse_bridge(c, 0.0);
    b.t = 1.4;
    const auto [next, nb] = reverse_step_em(psi, c, b, 0.031);
    const auto fwd = forward_step_em(psi, c, 0.031);
    EXPECT_LT((reconstructed(next) - reconstructed(fwd)).norm(), 1e-15);
    EXPECT_NEAR(nb.x.real(), 0.031, 1e-15);
  }
}

TEST(ReverseStepEm, ZeroNoiseLeavesStateButBridgeDecays) {
  const auto c = make_cfg("X", Mode::Dissipative, 0.0);
  NoiseStream s(9, 0, channel::kAux);
  const auto psi = random_state(1, s);
  BridgeState b = reverse_bridge(c, 0.8);
  const auto [next, nb] = reverse_step_em(psi, c, b, 0.0);
  EXPECT_LT((reconstructed(next) - psi.amplitudes()).norm(), 1e-15);
  EXPECT_NEAR(nb.x.real(), 0.8 * (1.0 - 1e-3), 1e-15);
}

TEST(ReverseExact, EqualRecordsReduceToForward) {
  const auto c = make_cfg("XY", Mode::Dissipative);
  NoiseStream s(10, 0, channel::kAux);
  const auto psi = random_state(2, s);
  const auto a = reverse_exact(psi, c, 0.4, 0.4, 1.3);
  const auto b = forward_exact(psi, c, 0.4, 1.3);
  EXPECT_LT((reconstructed(a) - reconstructed(b)).norm(), 1e-15);
}

TEST(ReverseExact, PinnedBridgeRecoversInitialState) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg("Z", m);
    NoiseStream s(11, 0, channel::kAux);
    const auto psi = random_state(1, s);
    EXPECT_NEAR(fidelity(reverse_exact(psi, c, 0.0, 1.7, 2.0), psi), 1.0, 1e-14);
  }
}

TEST(ReverseExact, MatchesOperatorProduct) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg("YZ", m, 0.45);
    NoiseStream s(12, 0, channel::kAux);
    const auto psi = random_state(2, s);
    const double X = s.normal(), W = s.normal(), t = 1.5;
    const cplx ph = c.jump_phase();
    const Operator F = exp_affine_pauli(m == Mode::Dissipative ? -c.p * t : 0.0, std::sqrt(c.p) * W * ph, c.P);
    const Operator R = exp_affine_pauli(0.0, std::sqrt(c.p) * (X - W) * ph, c.P);
    const Amplitudes ref = R * F * psi.amplitudes();
    EXPECT_LT((reconstructed(reverse_exact(psi, c, X, W, t)) - ref).norm(), 1e-12 * ref.norm());
  }
}

TEST(RunReverse, ExactSteppingRecoversEverySeed) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    for (const char* w : {"X", "Y", "Z", "XZ", "YY"}) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto c = make_cfg(w, m, 0.2, 1.0, 1e-3, seed);
        NoiseStream s(seed, 0, channel::kInitial);
        const auto psi = random_state(c.P.qubits(), s);
        const auto fr = run_forward_reverse(c, psi);
        ASSERT_TRUE(fr.reverse.terminal_fidelity.has_value());
        EXPECT_GE(*fr.reverse.terminal_fidelity, 1.0 - 1e-9) << w << " seed " << seed;
        EXPECT_EQ(fr.reverse.states.size(), c.steps() + 1);
      }
    }
  }
}

TEST(RunReverse, IntermediateStatesMatchClosedForm) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg("X", m, 0.2, 1.0, 1e-3, 21);
    const auto psi = QuantumState::basis(1, 0);
    const auto fwd = run_forward(c, psi);
    const double W_T = fwd.record.W(0);
    QuantumState phi(fwd.terminal().normalized());
    BridgeState b = reverse_bridge(c, W_T);
    NoiseStream stream(c.seed, 0, channel::kReverse);
    for (std::size_t i = 0; i < c.steps(); ++i) {
      b.t = c.T + static_cast<double>(i) * c.dt;
      const double dw = measurement_increment(phi, c.P, c.mode, c.p, c.dt, stream);
      std::tie(phi, b) = reverse_step(phi, c, b, dw);
      if ((i + 1) % 250 == 0) {
        const auto ref = reverse_exact(psi, c, b.x.real(), W_T, b.t);
        EXPECT_NEAR(fidelity(phi, ref), 1.0, 1e-12) << "t=" << b.t;
      }
    }
    EXPECT_EQ(b.x, cplx(0.0));
  }
}

TEST(RunReverse, NoNoiseAndNoRecordOnlyScales) {
  const auto c = make_cfg("X", Mode::Dissipative, 0.0);
  NoiseStream s(13, 0, channel::kAux);
  const auto psi = random_state(1, s);
  const auto res = run_reverse(c, psi, 0.0, psi);
  for (const auto& st : res.states) EXPECT_NEAR(fidelity(st, psi), 1.0, 1e-15);
}

TEST(RunReverse, EulerMaruyamaRecoversApproximately) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    double worst = 1.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto c = make_cfg("X", m, 0.2, 1.0, 1e-4, seed);
      c.stepper = Stepper::EulerMaruyama;
      const auto fr = run_forward_reverse(c, QuantumState::basis(1, 0));
      worst = std::min(worst, *fr.reverse.terminal_fidelity);
    }
    EXPECT_GT(worst, 0.99);
  }
}

TEST(SmeReverseStep, ConservingMaximallyMixedIsFixed) {
  const auto c = make_cfg("X", Mode::Conserving);
  const DensityMatrix rho(Operator::Identity(2, 2) * 0.5);
  BridgeState b = reverse_bridge(c, 0.6);
  for (SmeScheme sc : {SmeScheme::Euler, SmeScheme::ItoProduct, SmeScheme::Exact}) {
    const auto [next, nb] = sme_reverse_step(rho, c, b, 0.05, sc);
    // The product schemes rescale the identity; the normalized state is fixed.
    EXPECT_LT(oracle::max_abs_diff(next.normalized(), rho.entries()), 1e-14);
    if (sc == SmeScheme::Euler) EXPECT_LT(oracle::max_abs_diff(next.entries(), rho.entries()), 1e-15);
  }
}

TEST(SmeReverseStep, ZeroBridgeIsForwardUnravelling) {
  const auto c = make_cfg("Z", Mode::Dissipative, 0.3);
  NoiseStream s(14, 0, channel::kAux);
  const Operator rho = project_density(random_state(1, s)).entries();
  BridgeState b = reverse_bridge(c, 0.0);
  const double dw = 0.02;
  const auto [next, nb] = sme_reverse_step(DensityMatrix(rho), c, b, dw, SmeScheme::Euler);
  const Operator L = c.jump_operator();
  const Operator expect = rho + std::sqrt(c.p) * dw * (L * rho + rho * L) + c.p * c.dt * (L * rho * L - rho);
  EXPECT_LT(oracle::max_abs_diff(next.entries(), expect), 1e-15);
}

TEST(SmeReverseStep, ItoProductMatchesPureEulerStep) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    const auto c = make_cfg("XZ", m, 0.25);
    NoiseStream s(15, 0, channel::kAux);
    const auto psi = random_state(2, s);
    BridgeState b = reverse_bridge(c, 0.9);
    b.t = 1.3;
    const double dw = 0.017;
    const auto [rho, rb] = sme_reverse_step(project_density(psi), c, b, dw, SmeScheme::ItoProduct);
    const auto [phi, pb] = reverse_step_em(psi, c, b, dw);
    const Amplitudes v = reconstructed(phi);
    EXPECT_LT(oracle::max_abs_diff(rho.entries(), v * v.adjoint()), 1e-14);
    EXPECT_TRUE(rho.is_hermitian(1e-14));
  }
}

TEST(SmeReverseStep, EulerDiffersFromItoProductAtSecondOrder) {
  const auto c = make_cfg("X", Mode::Dissipative, 0.2, 1.0, 1e-4);
  NoiseStream s(16, 0, channel::kAux);
  const auto rho = project_density(random_state(1, s));
  BridgeState b = reverse_bridge(c, 0.3);
  const double dw = std::sqrt(c.dt);
  const auto [e, eb] = sme_reverse_step(rho, c, b, dw, SmeScheme::Euler);
  const auto [i, ib] = sme_reverse_step(rho, c, b, dw, SmeScheme::ItoProduct);
  const double diff = oracle::max_abs_diff(e.entries(), i.entries());
  EXPECT_LT(diff, 5.0 * c.p * c.dt);
  EXPECT_TRUE(e.is_hermitian(1e-14));
}

TEST(RunSmeReverse, TracksPureStateUnderSharedNoise) {
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    auto c = make_cfg("Y", m, 0.2, 1.0, 1e-3, 4);
    const auto psi = QuantumState::basis(1, 0);
    const auto fwd = run_forward(c, psi);
    const auto sme = run_sme_reverse(c, project_density(fwd.terminal()), fwd.record.W(0), SmeScheme::Exact);
    const auto pure = run_reverse(c, fwd.terminal(), fwd.record.W(0), psi);
    const Operator a = sme.states.back().normalized();
    const Operator b = project_density(pure.terminal()).entries();
    EXPECT_LT(trace_distance(a, b), 1e-9);
  }
}

}  // namespace
}  // namespace qrd
