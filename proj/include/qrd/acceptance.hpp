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

// Desk-scale acceptance experiments with fixed seeds. Shared by the
// acceptance test binary and `qrd verify`.

#pragma once

#include <chrono>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qrd/ensemble.hpp"

namespace qrd::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;  // one measured quantity per entry
  double seconds = 0.0;
};

struct Options {
  unsigned workers = 1;
  std::set<int> only;  // empty: all
};

namespace detail {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class... Args>
std::string fmt(const Args&... args) {
  std::ostringstream os;
  os.precision(4);
  (os << ... << args);
  return os.str();
}

inline QuantumState haar(std::size_t qubits, std::uint64_t seed, std::uint64_t traj) {
  NoiseStream s(seed, traj, channel::kInitial);
  return random_state(qubits, s);
}

}  // namespace detail

//---------------------------------------------------------------------------//

inline CriterionResult exact_recovery() {
  CriterionResult r{1, "exact single-channel recovery"};
  detail::Timer timer;
  double worst = 1.0;
  for (const char* w : {"X", "Y", "Z", "XZ"}) {
    for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
      double mn = 1.0;
      for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        ChannelConfig c;
        c.P = PauliString::parse(w);
        c.mode = m;
        c.p = 0.2;
        c.dt = 1e-3;
        c.seed = seed;
        const auto psi0 = detail::haar(c.P.qubits(), seed, 0);
        mn = std::min(mn, *run_forward_reverse(c, psi0).reverse.terminal_fidelity);
      }
      worst = std::min(worst, mn);
      r.details.push_back(detail::fmt("L=", w, " ", to_string(m), " min 1-F=", 1.0 - mn));
    }
  }
  r.seconds = timer.seconds();
  r.pass = worst >= 1.0 - 1e-9 && r.seconds < 10.0;
  r.details.push_back(detail::fmt("runtime ", r.seconds, " s (limit 10 s)"));
  return r;
}

inline CriterionResult em_convergence() {
  CriterionResult r{2, "Euler-Maruyama strong convergence"};
  detail::Timer timer;
  bool pass = true;
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    std::vector<std::pair<double, double>> pts;
    for (double dt : {1e-2, 1e-3, 1e-4}) {
      double sum = 0.0;
      const int paths = 100;
      for (int k = 0; k < paths; ++k) {
        ChannelConfig c;
        c.mode = m;
        c.p = 0.2;
        c.dt = dt;
        c.seed = 202;
        c.stepper = Stepper::EulerMaruyama;
        const auto psi0 = detail::haar(1, c.seed, static_cast<std::uint64_t>(k));
        const auto res = run_forward(c, psi0, static_cast<std::uint64_t>(k));
        const auto ref = forward_exact(psi0, c, res.record.W(0), c.T);
        // Distance between normalized states with the global phase removed.
        const Amplitudes a = res.terminal().normalized(), b = ref.normalized();
        const cplx ov = b.dot(a);
        const cplx ph = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
        sum += (a - ph * b).squaredNorm();
      }
      pts.emplace_back(dt, std::sqrt(sum / paths));
    }
    const auto fit = loglog_fit(pts);
    pass = pass && fit.slope >= 0.45;
    r.details.push_back(detail::fmt(to_string(m), " errors ", pts[0].second, " ", pts[1].second, " ", pts[2].second,
                                    " order ", fit.slope, " (need >= 0.45)"));
  }
  r.pass = pass;
  r.seconds = timer.seconds();
  return r;
}

/// Channel ensemble with L = sigma_x, p = 0.2, T = 1, dt = 1e-3, n = 2000.
inline EnsembleResult flow_ensemble(Mode m, ReverseNoise noise, unsigned workers) {
  EnsembleSpec s;
  s.engine = Engine::Channel;
  s.channel.P = PauliString::parse("X");
  s.channel.mode = m;
  s.channel.p = 0.2;
  s.channel.dt = 1e-3;
  s.channel.reverse_noise = noise;
  s.n_traj = 2000;
  s.base_seed = 2024;
  s.workers = workers;
  s.time_grid = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  s.store_increments = false;
  s.store_states = StateDump::None;
  return run_ensemble(s);
}

inline CriterionResult time_reversal(const std::array<EnsembleResult, 2>& detector, const EnsembleResult& innovation,
                                     double seconds) {
  CriterionResult r{3, "statistical time-reversal (matched-time KS, n=2000)"};
  bool pass = true;
  const std::array<Mode, 2> modes{Mode::Dissipative, Mode::Conserving};
  for (std::size_t i = 0; i < 2; ++i) {
    std::string line = detail::fmt(to_string(modes[i]), ":");
    for (const auto& k : detector[i].summary.time_reversal) {
      pass = pass && !k.ks.reject;
      line += detail::fmt(" s=", k.s, " D=", k.ks.statistic, " p=", k.ks.p_value, k.ks.reject ? " reject" : " accept");
    }
    r.details.push_back(line);
  }
  std::string line = "dissipative, innovation-only reverse record (informational):";
  for (const auto& k : innovation.summary.time_reversal)
    line += detail::fmt(" s=", k.s, " D=", k.ks.statistic, " p=", k.ks.p_value, k.ks.reject ? " reject" : " accept");
  r.details.push_back(line);
  r.seconds = seconds;
  r.pass = pass && seconds < 60.0;
  r.details.push_back(detail::fmt("runtime ", seconds, " s (limit 60 s)"));
  return r;
}

inline CriterionResult flow_quantiles(const EnsembleResult& e) {
  CriterionResult r{4, "fidelity flow: forward spread, reverse reconcentration"};
  const auto& t = e.flow.times;
  const auto at = [&](double x) {
    for (std::size_t g = 0; g < t.size(); ++g)
      if (std::abs(t[g] - x) < 1e-9) return g;
    throw std::logic_error("time not on grid");
  };
  const double q_fwd = e.flow.q05()[at(1.0)], q_rev = e.flow.q05()[at(2.0)];
  r.pass = q_fwd < 0.9 && q_rev >= 0.999;
  r.details.push_back(detail::fmt("q05(t=1) = ", q_fwd, " (need < 0.9)"));
  r.details.push_back(detail::fmt("q05(t=2) = ", q_rev, " (need >= 0.999)"));
  std::string q = "q05 over t:";
  for (std::size_t g = 0; g < t.size(); ++g) q += detail::fmt(" ", t[g], ":", e.flow.q05()[g]);
  r.details.push_back(q);
  return r;
}

inline CriterionResult depol_scaling(unsigned workers) {
  CriterionResult r{5, "depolarizing reverse fidelity scaling"};
  detail::Timer timer;
  bool pass = true;
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    EnsembleSpec s;
    s.depolarizing.mode = m;
    s.depolarizing.T = 1.0;
    s.depolarizing.dt = 1e-4;
    s.n_traj = 500;
    s.base_seed = 5;
    s.workers = workers;
    const auto sc = run_depol_scaling(s, {0.05, 0.1, 0.2});
    std::string line = detail::fmt(to_string(m), " deficits");
    for (const auto& [x, y] : sc.points) line += detail::fmt(" pT=", x, ":", y);
    if (sc.fit) {
      pass = pass && sc.fit->slope >= 2.5 && sc.fit->slope <= 3.5;
      line += detail::fmt(" slope ", sc.fit->slope, " (need [2.5, 3.5])");
    } else {
      pass = false;
      line += " fit failed: " + sc.fit_error;
    }
    r.details.push_back(line);
  }
  r.seconds = timer.seconds();
  r.pass = pass && r.seconds < 300.0;
  r.details.push_back(detail::fmt("runtime ", r.seconds, " s (limit 300 s)"));
  return r;
}

inline CriterionResult magnus_order() {
  CriterionResult r{6, "Magnus-2 error order in t"};
  detail::Timer timer;
  const std::array<double, 3> times{0.25, 0.5, 1.0};
  bool pass = true;
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    DepolarizingConfig c;
    c.mode = m;
    c.p = 0.1;
    c.dt = 1e-5;
    c.seed = 606;
    std::array<double, 3> sum{};
    const int paths = 40;
    const std::size_t n_end = step_index(times.back(), c.dt);
    for (int k = 0; k < paths; ++k) {
      const auto psi0 = detail::haar(1, c.seed, static_cast<std::uint64_t>(k));
      auto streams = depol_streams(c.seed, static_cast<std::uint64_t>(k), channel::kForward);
      MeasurementRecord rec(3, c.dt);
      QuantumState psi = psi0;
      std::size_t next = 0;
      for (std::size_t i = 1; i <= n_end; ++i) {
        const Triple dw = depol_measurement_increments(psi, c, streams);
        rec.append(dw);
        psi = forward_depol_step(std::move(psi), c, dw);
        if (i == step_index(times[next], c.dt)) {
          const double f = fidelity(magnus2_solution(psi0, rec, c, times[next]), psi);
          sum[next] += 1.0 - f * f;
          ++next;
        }
      }
    }
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < 3; ++j) pts.emplace_back(times[j], std::sqrt(sum[j] / paths));
    const auto fit = loglog_fit(pts);
    pass = pass && std::abs(fit.slope - 1.5) <= 0.3;
    r.details.push_back(detail::fmt(to_string(m), " RMS ", pts[0].second, " ", pts[1].second, " ", pts[2].second,
                                    " exponent ", fit.slope, " (need 1.5 +- 0.3)"));
  }
  r.pass = pass;
  r.seconds = timer.seconds();
  return r;
}

inline CriterionResult gate_determinism() {
  CriterionResult r{7, "diffusion-driven gate determinism"};
  detail::Timer timer;
  double min_exact = 1.0, min_em = 1.0, max_h = 0.0;
  for (const char* w : {"X", "ZX"}) {
    for (double th : {std::numbers::pi / 4, std::numbers::pi / 2, 1.0}) {
      for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        GateConfig g;
        g.P = PauliString::parse(w);
        g.theta = th;
        g.p = 0.2;
        g.seed = seed;
        const auto psi0 = detail::haar(g.P.qubits(), seed, 0);
        g.dt = 1e-3;
        const auto ex = run_gate(g, psi0);
        min_exact = std::min(min_exact, *ex.terminal_fidelity);
        max_h = std::max(max_h, ex.max_drift_strength);
        g.dt = 1e-4;
        g.stepper = Stepper::EulerMaruyama;
        min_em = std::min(min_em, *run_gate(g, psi0).terminal_fidelity);
      }
    }
  }
  r.pass = min_exact >= 1.0 - 1e-9 && min_em >= 1.0 - 1e-2;
  r.details.push_back(detail::fmt("exact min 1-F = ", 1.0 - min_exact, " (need <= 1e-9)"));
  r.details.push_back(detail::fmt("EM dt=1e-4 min 1-F = ", 1.0 - min_em, " (need <= 1e-2)"));
  r.details.push_back(detail::fmt("max drift strength |H| = ", max_h));
  r.seconds = timer.seconds();
  return r;
}

inline CriterionResult teleport_bounds() {
  CriterionResult r{8, "teleportation failure bounds, d_min limit, cancellation identity"};
  detail::Timer timer;
  bool pass = true;
  const auto L = PauliString::parse("X");
  const int trials = 10000;
  for (double th : {0.0, 0.05, 0.1}) {
    const double bound = worst_case_fail_prob(0, 1.0, th);
    const double se = std::sqrt(bound * (1.0 - bound) / trials);
    NoiseStream bell(808, 0, channel::kTeleport), init(808, 0, channel::kInitial);
    Amplitudes minus(2);
    minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    int bad_haar = 0, bad_worst = 0;
    for (int i = 0; i < trials; ++i) {
      bad_haar += teleport_round(random_state(1, init), DriftOp{L, th, 1.0, 1}, bell).good ? 0 : 1;
      bad_worst += teleport_round(QuantumState(minus), DriftOp{L, th, 1.0, 1}, bell).good ? 0 : 1;
    }
    const double fh = static_cast<double>(bad_haar) / trials, fw = static_cast<double>(bad_worst) / trials;
    pass = pass && fh <= bound + 3.0 * se && fw <= bound + 3.0 * se;
    r.details.push_back(detail::fmt("sqrt(p)dY=", th, " bound ", bound, " +3sigma ", bound + 3.0 * se,
                                    " freq(Haar) ", fh, " freq(-L eigenstate) ", fw));
  }
  std::string dline = "d_min(eps, dy=0):";
  for (double eps : {0.5, 0.125, 1e-3}) {
    const unsigned d = d_min(eps, 0.2, 0.0);
    const auto expect = static_cast<unsigned>(std::ceil(std::log2(1.0 / eps)));
    pass = pass && d == expect;
    dline += detail::fmt(" eps=", eps, "->", d, " (ceil log2 = ", expect, ")");
  }
  r.details.push_back(dline);
  double worst = 0.0;
  const Operator z = single_qubit_pauli(Axis::Z);
  for (double dy : {-0.3, 0.02, 0.2}) {
    for (std::uint64_t n : {1u, 2u, 4u, 8u}) {
      const Operator Rn = drift_operator(dy, 0.2, L, n);
      const double lam = std::pow(lambda_min(dy, 0.2), static_cast<double>(n));
      worst = std::max(worst, (Rn * z * Rn * z - lam * Operator::Identity(2, 2)).cwiseAbs().maxCoeff());
    }
  }
  pass = pass && worst <= 1e-10;
  r.details.push_back(detail::fmt("cancellation identity max deviation ", worst, " (need <= 1e-10)"));
  r.pass = pass;
  r.seconds = timer.seconds();
  return r;
}

inline CriterionResult dimension_independence() {
  CriterionResult r{9, "failure probability independent of qubit count"};
  detail::Timer timer;
  // L = X^m on cos(a)|+..+> + sin(a)|-+..+>, so <L> = cos(2a) for every m.
  const double a = 0.4, th = 0.1;
  const int trials = 10000;
  std::vector<std::vector<double>> table;
  std::string line = "bad-branch frequency:";
  for (std::size_t m = 1; m <= 3; ++m) {
    const PauliString L(std::vector<Axis>(m, Axis::X));
    const auto dim = static_cast<Eigen::Index>(L.dim());
    const Amplitudes plus = Amplitudes::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    std::vector<Axis> zw(m, Axis::I);
    zw[0] = Axis::Z;
    const QuantumState psi(std::cos(a) * plus + std::sin(a) * PauliString(zw).apply(plus));
    NoiseStream s(909, m, channel::kTeleport);
    double bad = 0.0;
    for (int i = 0; i < trials; ++i) bad += teleport_round(psi, DriftOp{L, th, 1.0, 1}, s).good ? 0.0 : 1.0;
    table.push_back({trials - bad, bad});
    line += detail::fmt(" m=", m, ":", bad / trials);
  }
  const auto chi = chi_square_homogeneity(table, 0.01);
  r.pass = !chi.reject;
  r.details.push_back(line);
  r.details.push_back(detail::fmt("chi2 = ", chi.statistic, " dof ", chi.dof, " p = ", chi.p_value, " (alpha 0.01)"));
  r.seconds = timer.seconds();
  return r;
}

inline CriterionResult sme_consistency() {
  CriterionResult r{10, "reverse SME matches pure-state reverse under shared noise"};
  detail::Timer timer;
  bool pass = true;
  struct Pairing {
    SmeScheme sme;
    Stepper pure;
    const char* label;
    bool scored;
  };
  const std::array<Pairing, 3> pairs{{{SmeScheme::ItoProduct, Stepper::EulerMaruyama, "Ito-product SME vs EM", true},
                                      {SmeScheme::Exact, Stepper::Exact, "exact SME vs exact", true},
                                      {SmeScheme::Euler, Stepper::EulerMaruyama, "literal Euler SME vs EM", false}}};
  for (Mode m : {Mode::Dissipative, Mode::Conserving}) {
    for (const auto& pr : pairs) {
      double worst = 0.0;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ChannelConfig c;
        c.mode = m;
        c.p = 0.2;
        c.dt = 1e-4;
        c.seed = seed;
        const auto psi0 = detail::haar(1, seed, 0);
        const auto fwd = run_forward(c, psi0);
        c.stepper = pr.pure;
        const auto pure = run_reverse(c, fwd.terminal(), fwd.record.W(0), psi0);
        const auto sme = run_sme_reverse(c, project_density(fwd.terminal()), fwd.record.W(0), pr.sme);
        worst = std::max(worst, trace_distance(sme.states.back().normalized(), project_density(pure.terminal()).entries()));
      }
      if (pr.scored) pass = pass && worst < 1e-6;
      r.details.push_back(detail::fmt(to_string(m), " ", pr.label, ": max trace distance ", worst,
                                      pr.scored ? " (need < 1e-6)" : " (informational)"));
    }
  }
  r.pass = pass;
  r.seconds = timer.seconds();
  return r;
}

//---------------------------------------------------------------------------//

/// Runs the selected criteria in order, calling report after each one.
inline std::vector<CriterionResult> run(const Options& opt,
                                        const std::function<void(const CriterionResult&)>& report = {}) {
  auto want = [&](int id) { return opt.only.empty() || opt.only.count(id) > 0; };
  std::vector<CriterionResult> out;
  auto emit = [&](CriterionResult r) {
    if (report) report(r);
    out.push_back(std::move(r));
  };
  if (want(1)) emit(exact_recovery());
  if (want(2)) emit(em_convergence());
  if (want(3) || want(4)) {
    detail::Timer timer;
    std::array<EnsembleResult, 2> det{flow_ensemble(Mode::Dissipative, ReverseNoise::Detector, opt.workers),
                                      flow_ensemble(Mode::Conserving, ReverseNoise::Detector, opt.workers)};
    const double secs = timer.seconds();
    if (want(3)) {
      const auto inn = flow_ensemble(Mode::Dissipative, ReverseNoise::Innovation, opt.workers);
      emit(time_reversal(det, inn, secs));
    }
    if (want(4)) emit(flow_quantiles(det[0]));
  }
  if (want(5)) emit(depol_scaling(opt.workers));
  if (want(6)) emit(magnus_order());
  if (want(7)) emit(gate_determinism());
  if (want(8)) emit(teleport_bounds());
  if (want(9)) emit(dimension_independence());
  if (want(10)) emit(sme_consistency());
  return out;
}

inline std::string format(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title;
  for (const auto& d : r.details) os << "\n        " << d;
  return os.str();
}

}  // namespace qrd::acceptance
