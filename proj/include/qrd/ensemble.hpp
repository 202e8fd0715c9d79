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

// Monte Carlo ensembles over the engines. Trajectory i draws every random
// number from streams keyed by (base_seed, i, channel), results are stored by
// index and reduced in index order, so outputs do not depend on the worker count.

#pragma once

#include <array>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qrd/io.hpp"
#include "qrd/stats.hpp"

namespace qrd {

enum class Engine : std::uint8_t { Channel, Depolarizing, Gate, Teleport };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Channel: return "channel";
    case Engine::Depolarizing: return "depolarizing";
    case Engine::Gate: return "gate";
    case Engine::Teleport: return "teleport";
  }
  return "?";
}

inline Engine parse_engine(std::string_view s) {
  if (s == "channel") return Engine::Channel;
  if (s == "depolarizing") return Engine::Depolarizing;
  if (s == "gate") return Engine::Gate;
  if (s == "teleport") return Engine::Teleport;
  throw std::invalid_argument("unknown engine '" + std::string(s) + "' (expected channel|depolarizing|gate|teleport)");
}

/// Which states go into trajectories.jsonl.
enum class StateDump : std::uint8_t { None, Grid, All };

inline std::string_view to_string(StateDump d) {
  return d == StateDump::None ? "none" : d == StateDump::Grid ? "grid" : "all";
}

inline StateDump parse_state_dump(std::string_view s) {
  if (s == "none") return StateDump::None;
  if (s == "grid") return StateDump::Grid;
  if (s == "all") return StateDump::All;
  throw std::invalid_argument("unknown state dump '" + std::string(s) + "' (expected none|grid|all)");
}

struct EnsembleSpec {
  Engine engine = Engine::Channel;
  ChannelConfig channel;             // channel and teleport engines
  DepolarizingConfig depolarizing;
  GateConfig gate;
  ResourceBudget budget;             // teleport engine
  std::size_t n_traj = 1;
  std::vector<double> time_grid;     // empty: grid_points uniform times over the span
  std::size_t grid_points = 101;
  std::uint64_t base_seed = 1;       // overrides the engine config seed
  unsigned workers = 1;
  std::optional<Amplitudes> psi0;    // unset: Haar-random per trajectory
  std::size_t bins = 100;
  bool store_increments = true;
  StateDump store_states = StateDump::Grid;

  double T() const {
    switch (engine) {
      case Engine::Depolarizing: return depolarizing.T;
      case Engine::Gate: return gate.T;
      default: return channel.T;
    }
  }
  double dt() const {
    switch (engine) {
      case Engine::Depolarizing: return depolarizing.dt;
      case Engine::Gate: return gate.dt;
      default: return channel.dt;
    }
  }
  std::size_t qubits() const {
    switch (engine) {
      case Engine::Depolarizing: return 1;
      case Engine::Gate: return gate.P.qubits();
      default: return channel.P.qubits();
    }
  }
  /// Gate runs only cover [T, 2T]; the others run forward then reverse.
  double t_start() const { return engine == Engine::Gate ? T() : 0.0; }
  double t_end() const { return 2.0 * T(); }
  std::size_t path_steps() const { return whole_steps(t_end() - t_start(), dt()); }

  void validate() const {
    switch (engine) {
      case Engine::Channel: channel.validate(); break;
      case Engine::Depolarizing: depolarizing.validate_reverse(); break;
      case Engine::Gate: gate.validate(); break;
      case Engine::Teleport: TeleportConfig{channel, budget}.validate(); break;
    }
    if (n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (bins < 1) throw std::invalid_argument("bins must be at least 1");
    if (time_grid.empty() && grid_points < 2) throw std::invalid_argument("grid_points must be at least 2");
    const double tol = 1e-9 * std::max(1.0, T());
    for (double t : time_grid)
      if (!(t >= t_start() - tol && t <= t_end() + tol))
        throw std::invalid_argument("time_grid entry " + format_double(t) + " outside [" + format_double(t_start()) +
                                    ", " + format_double(t_end()) + "]");
    if (psi0 && static_cast<std::size_t>(psi0->size()) != (std::size_t{1} << qubits()))
      throw std::invalid_argument("psi0 dimension does not match the engine");
    (void)path_steps();
  }

  /// Step indices along the path for each output time (nearest step).
  std::vector<std::size_t> grid_indices() const {
    const std::size_t n = path_steps();
    std::vector<std::size_t> idx;
    if (time_grid.empty()) {
      for (std::size_t g = 0; g < grid_points; ++g)
        idx.push_back(static_cast<std::size_t>(
            std::llround(static_cast<double>(g) * static_cast<double>(n) / static_cast<double>(grid_points - 1))));
    } else {
      for (double t : time_grid) {
        const auto k = std::llround((t - t_start()) / dt());
        idx.push_back(static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(n))));
      }
    }
    return idx;
  }

  std::vector<double> grid_times() const {
    std::vector<double> t;
    for (std::size_t k : grid_indices()) t.push_back(t_start() + static_cast<double>(k) * dt());
    return t;
  }
};

/// One measurement-record segment of a trajectory.
struct SegmentRecord {
  std::string name;  // forward | reverse
  double t0 = 0.0;
  std::vector<std::vector<double>> increments;  // [channel][step]

  bool operator==(const SegmentRecord&) const = default;
};

/// Persisted form of a single trajectory.
struct TrajectoryRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::string engine;
  double dt = 0.0;
  Amplitudes psi0;
  std::vector<SegmentRecord> segments;
  std::vector<double> state_times;
  std::vector<Amplitudes> states;
  std::vector<double> fidelity;  // on the ensemble grid
  std::optional<double> terminal_fidelity;
  std::optional<double> theta;
  std::optional<double> max_drift_strength;
  std::vector<std::uint32_t> attempts;
  bool failed = false;
  std::optional<std::size_t> failed_step;
};

inline bool operator==(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.states.size() != b.states.size()) return false;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    if (a.states[i].size() != b.states[i].size() || a.states[i] != b.states[i]) return false;
  return a.index == b.index && a.seed == b.seed && a.engine == b.engine && a.dt == b.dt &&
         a.psi0.size() == b.psi0.size() && a.psi0 == b.psi0 && a.segments == b.segments &&
         a.state_times == b.state_times && a.fidelity == b.fidelity && a.terminal_fidelity == b.terminal_fidelity &&
         a.theta == b.theta && a.max_drift_strength == b.max_drift_strength && a.attempts == b.attempts &&
         a.failed == b.failed && a.failed_step == b.failed_step;
}

inline json to_json(const TrajectoryRecord& r) {
  json j;
  j["index"] = r.index;
  j["seed"] = r.seed;
  j["engine"] = r.engine;
  j["dt"] = r.dt;
  j["psi0"] = amplitudes_to_json(r.psi0);
  j["segments"] = json::array();
  for (const auto& s : r.segments) j["segments"].push_back({{"name", s.name}, {"t0", s.t0}, {"increments", s.increments}});
  j["state_times"] = r.state_times;
  j["states"] = json::array();
  for (const auto& s : r.states) j["states"].push_back(amplitudes_to_json(s));
  j["fidelity"] = r.fidelity;
  j["terminal_fidelity"] = r.terminal_fidelity ? json(*r.terminal_fidelity) : json(nullptr);
  if (r.theta) j["theta"] = *r.theta;
  if (r.max_drift_strength) j["max_drift_strength"] = *r.max_drift_strength;
  if (!r.attempts.empty()) j["attempts"] = r.attempts;
  j["failed"] = r.failed;
  if (r.failed_step) j["failed_step"] = *r.failed_step;
  return j;
}

inline TrajectoryRecord trajectory_from_json(const json& j) {
  TrajectoryRecord r;
  r.index = j.at("index").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.engine = j.at("engine").get<std::string>();
  r.dt = j.at("dt").get<double>();
  r.psi0 = amplitudes_from_json(j.at("psi0"));
  for (const auto& s : j.at("segments"))
    r.segments.push_back({s.at("name").get<std::string>(), s.at("t0").get<double>(),
                          s.at("increments").get<std::vector<std::vector<double>>>()});
  r.state_times = j.at("state_times").get<std::vector<double>>();
  for (const auto& s : j.at("states")) r.states.push_back(amplitudes_from_json(s));
  r.fidelity = j.at("fidelity").get<std::vector<double>>();
  if (!j.at("terminal_fidelity").is_null()) r.terminal_fidelity = j["terminal_fidelity"].get<double>();
  if (j.contains("theta")) r.theta = j["theta"].get<double>();
  if (j.contains("max_drift_strength")) r.max_drift_strength = j["max_drift_strength"].get<double>();
  if (j.contains("attempts")) r.attempts = j["attempts"].get<std::vector<std::uint32_t>>();
  r.failed = j.at("failed").get<bool>();
  if (j.contains("failed_step")) r.failed_step = j["failed_step"].get<std::size_t>();
  return r;
}

inline constexpr std::array<double, 5> kFlowLevels = {0.05, 0.25, 0.5, 0.75, 0.95};

struct FidelityFlow {
  std::vector<double> times;
  std::vector<double> mean;
  std::array<std::vector<double>, 5> quantiles;       // at kFlowLevels
  std::vector<std::vector<std::uint64_t>> histograms;  // [time][bin], uniform bins on [0, 1]

  const std::vector<double>& q05() const { return quantiles[0]; }
  const std::vector<double>& q95() const { return quantiles[4]; }
};

struct TimeReversalKs {
  double s = 0.0;  // forward time s T against reverse time (2 - s) T
  std::size_t n = 0;
  KsResult ks;
};

struct EnsembleSummary {
  std::size_t n_traj = 0;
  std::size_t completed = 0;  // trajectories without an exhausted teleport budget
  double terminal_mean = 0.0;
  double terminal_min = 0.0;
  std::vector<TimeReversalKs> time_reversal;
  std::optional<ResourceLedger> ledger;
  std::optional<double> max_drift_strength;
};

struct EnsembleResult {
  EnsembleSpec spec;
  FidelityFlow flow;
  EnsembleSummary summary;
  std::vector<TrajectoryRecord> trajectories;
};

namespace detail {

inline constexpr std::array<double, 3> kMatchedTimes = {0.25, 0.5, 0.75};

struct Outcome {
  TrajectoryRecord record;
  std::array<double, 3> matched_forward{};
  std::array<double, 3> matched_reverse{};
  ResourceLedger ledger;
};

inline SegmentRecord segment_of(const std::string& name, const TrajectoryResult& r) {
  SegmentRecord s;
  s.name = name;
  s.t0 = r.t0;
  for (std::size_t k = 0; k < r.record.channels(); ++k) s.increments.push_back(r.record.increments(k));
  return s;
}

inline Outcome run_one(const EnsembleSpec& spec, const std::vector<std::size_t>& grid, std::uint64_t i) {
  Outcome out;
  auto& rec = out.record;
  rec.index = i;
  rec.seed = spec.base_seed;
  rec.engine = std::string(to_string(spec.engine));
  rec.dt = spec.dt();

  QuantumState psi0 = QuantumState::basis(spec.qubits(), 0);
  if (spec.psi0) {
    psi0 = QuantumState(QuantumState(*spec.psi0).normalized());
  } else {
    NoiseStream s(spec.base_seed, i, channel::kInitial);
    psi0 = random_state(spec.qubits(), s);
  }
  rec.psi0 = psi0.amplitudes();

  // Concatenated path; the first state of a later segment repeats the last of
  // the previous one and is skipped.
  std::vector<TrajectoryResult> parts;
  switch (spec.engine) {
    case Engine::Channel: {
      ChannelConfig c = spec.channel;
      c.seed = spec.base_seed;
      auto fr = run_forward_reverse(c, psi0, i);
      parts.push_back(std::move(fr.forward));
      parts.push_back(std::move(fr.reverse));
      break;
    }
    case Engine::Depolarizing: {
      DepolarizingConfig c = spec.depolarizing;
      c.seed = spec.base_seed;
      auto fwd = run_depol_forward(c, psi0, i);
      auto rev = run_depol_reverse(c, fwd.terminal(), fwd.record, psi0, i);
      parts.push_back(std::move(fwd));
      parts.push_back(std::move(rev.trajectory));
      break;
    }
    case Engine::Gate: {
      GateConfig c = spec.gate;
      c.seed = spec.base_seed;
      c = gate_config_for(c, i);
      parts.push_back(run_gate(c, psi0, i));
      rec.theta = parts.back().theta;
      rec.max_drift_strength = parts.back().max_drift_strength;
      break;
    }
    case Engine::Teleport: {
      TeleportConfig c{spec.channel, spec.budget};
      c.channel.seed = spec.base_seed;
      auto fwd = run_forward(c.channel, psi0, i);
      auto run = run_teleport(c, fwd.terminal(), fwd.record.W(0), psi0, i);
      parts.push_back(std::move(fwd));
      parts.push_back(std::move(run.trajectory));
      rec.failed = run.failed;
      rec.failed_step = run.failed_step;
      rec.attempts = parts.back().attempts;
      out.ledger = run.ledger;
      break;
    }
  }

  std::vector<const QuantumState*> path;
  for (std::size_t s = 0; s < parts.size(); ++s)
    for (std::size_t k = (s == 0 ? 0 : 1); k < parts[s].states.size(); ++k) path.push_back(&parts[s].states[k]);
  // A failed teleport run stops early; later times hold its last state.
  auto at = [&](std::size_t k) -> const QuantumState& { return *path[std::min(k, path.size() - 1)]; };
  auto fid = [&](std::size_t k) { return fidelity(at(k), psi0); };

  static const std::array<const char*, 2> names = {"forward", "reverse"};
  if (spec.store_increments)
    for (std::size_t s = 0; s < parts.size(); ++s)
      rec.segments.push_back(segment_of(spec.engine == Engine::Gate ? "reverse" : names[s], parts[s]));

  for (std::size_t k : grid) rec.fidelity.push_back(fid(k));
  const double t0 = spec.t_start(), dt = spec.dt();
  if (spec.store_states == StateDump::Grid) {
    for (std::size_t k : grid) {
      rec.state_times.push_back(t0 + static_cast<double>(k) * dt);
      rec.states.push_back(at(k).normalized());
    }
  } else if (spec.store_states == StateDump::All) {
    for (std::size_t k = 0; k < path.size(); ++k) {
      rec.state_times.push_back(t0 + static_cast<double>(k) * dt);
      rec.states.push_back(path[k]->normalized());
    }
  }

  if (!rec.failed) rec.terminal_fidelity = parts.back().terminal_fidelity;
  if (spec.engine != Engine::Gate) {
    const std::size_t n = parts.front().steps();
    for (std::size_t m = 0; m < kMatchedTimes.size(); ++m) {
      const auto k = static_cast<std::size_t>(std::llround(kMatchedTimes[m] * static_cast<double>(n)));
      out.matched_forward[m] = fid(k);
      out.matched_reverse[m] = fid(2 * n - k);
    }
  }
  return out;
}

}  // namespace detail

inline FidelityFlow fidelity_flow(const std::vector<double>& times, const std::vector<TrajectoryRecord>& recs,
                                  std::size_t bins = 100) {
  if (recs.empty()) throw std::invalid_argument("fidelity_flow needs at least one trajectory");
  FidelityFlow f;
  f.times = times;
  std::vector<double> col(recs.size());
  for (std::size_t g = 0; g < times.size(); ++g) {
    for (std::size_t i = 0; i < recs.size(); ++i) col[i] = recs[i].fidelity.at(g);
    f.mean.push_back(mean(col));
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t q = 0; q < kFlowLevels.size(); ++q) f.quantiles[q].push_back(quantile_sorted(sorted, kFlowLevels[q]));
    std::vector<std::uint64_t> h(bins, 0);
    for (double x : col) {
      const auto b = static_cast<std::size_t>(std::clamp(x, 0.0, 1.0) * static_cast<double>(bins));
      ++h[std::min(b, bins - 1)];
    }
    f.histograms.push_back(std::move(h));
  }
  return f;
}

inline EnsembleResult run_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  const auto grid = spec.grid_indices();
  std::vector<std::optional<detail::Outcome>> outcomes(spec.n_traj);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(spec.workers, spec.n_traj));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < spec.n_traj; i += workers) outcomes[i] = detail::run_one(spec, grid, i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  EnsembleResult res;
  res.spec = spec;
  auto& sum = res.summary;
  sum.n_traj = spec.n_traj;
  std::vector<double> terminal;
  std::array<std::vector<double>, 3> fwd, rev;
  ResourceLedger ledger;
  for (auto& o : outcomes) {
    auto& rec = o->record;
    ledger.merge(o->ledger);
    if (rec.max_drift_strength)
      sum.max_drift_strength = std::max(sum.max_drift_strength.value_or(0.0), *rec.max_drift_strength);
    if (!rec.failed) {
      ++sum.completed;
      if (rec.terminal_fidelity) terminal.push_back(*rec.terminal_fidelity);
      for (std::size_t m = 0; m < 3; ++m) {
        fwd[m].push_back(o->matched_forward[m]);
        rev[m].push_back(o->matched_reverse[m]);
      }
    }
    res.trajectories.push_back(std::move(rec));
  }
  if (!terminal.empty()) {
    sum.terminal_mean = mean(terminal);
    sum.terminal_min = *std::min_element(terminal.begin(), terminal.end());
  }
  if (spec.engine != Engine::Gate && sum.completed > 0)
    for (std::size_t m = 0; m < 3; ++m)
      sum.time_reversal.push_back({detail::kMatchedTimes[m], fwd[m].size(), ks_two_sample(fwd[m], rev[m], 0.01)});
  if (spec.engine == Engine::Teleport) sum.ledger = ledger;
  res.flow = fidelity_flow(spec.grid_times(), res.trajectories, spec.bins);
  return res;
}

//---------------------------------------------------------------------------//
// Depolarizing scaling experiment
//---------------------------------------------------------------------------//

struct ScalingExperiment {
  std::vector<std::pair<double, double>> points;  // (pT, 1 - mean terminal fidelity)
  std::optional<ScalingFit> fit;
  std::string fit_error;
};

/// One depolarizing ensemble per pT (p = pT / T), fitted on log-log axes.
inline ScalingExperiment run_depol_scaling(EnsembleSpec spec, const std::vector<double>& pT) {
  spec.engine = Engine::Depolarizing;
  spec.store_increments = false;
  spec.store_states = StateDump::None;
  spec.time_grid = {spec.t_start(), spec.t_end()};
  ScalingExperiment out;
  for (double x : pT) {
    spec.depolarizing.p = x / spec.depolarizing.T;
    const auto r = run_ensemble(spec);
    out.points.emplace_back(x, 1.0 - r.summary.terminal_mean);
  }
  try {
    out.fit = scaling_fit(out.points);
  } catch (const std::invalid_argument& e) {
    out.fit_error = e.what();
  }
  return out;
}

//---------------------------------------------------------------------------//
// Persistence
//---------------------------------------------------------------------------//

inline json to_json(const EnsembleSpec& s) {
  json j;
  j["engine"] = to_string(s.engine);
  switch (s.engine) {
    case Engine::Channel: j["channel"] = to_json(s.channel); break;
    case Engine::Depolarizing: j["depolarizing"] = to_json(s.depolarizing); break;
    case Engine::Gate: j["gate"] = to_json(s.gate); break;
    case Engine::Teleport:
      j["channel"] = to_json(s.channel);
      j["budget"] = to_json(s.budget);
      break;
  }
  j["n_traj"] = s.n_traj;
  j["time_grid"] = s.grid_times();
  j["base_seed"] = s.base_seed;
  j["workers"] = s.workers;
  if (s.psi0) j["psi0"] = amplitudes_to_json(*s.psi0);
  j["bins"] = s.bins;
  j["store_increments"] = s.store_increments;
  j["store_states"] = to_string(s.store_states);
  return j;
}

inline json ks_to_json(const KsResult& k) {
  return {{"statistic", k.statistic}, {"p_value", k.p_value}, {"alpha", k.alpha}, {"reject", k.reject}};
}

inline json summary_to_json(const EnsembleResult& r, const std::optional<ScalingExperiment>& scaling = std::nullopt) {
  const auto& s = r.summary;
  json j;
  j["spec"] = to_json(r.spec);
  j["n_traj"] = s.n_traj;
  j["completed"] = s.completed;
  j["terminal_fidelity"] = {{"mean", s.terminal_mean}, {"min", s.terminal_min}};
  j["time_reversal_ks"] = json::array();
  for (const auto& k : s.time_reversal) {
    json e = ks_to_json(k.ks);
    e["s"] = k.s;
    e["n"] = k.n;
    j["time_reversal_ks"].push_back(e);
  }
  if (s.ledger) j["teleport_ledger"] = to_json(*s.ledger);
  if (s.max_drift_strength) j["max_drift_strength"] = *s.max_drift_strength;
  if (scaling) {
    json sc;
    sc["points"] = json::array();
    for (const auto& [x, y] : scaling->points) sc["points"].push_back({{"pT", x}, {"deficit", y}});
    if (scaling->fit)
      sc["fit"] = {{"slope", scaling->fit->slope},
                   {"intercept", scaling->fit->intercept},
                   {"residual", scaling->fit->residual}};
    else
      sc["fit_error"] = scaling->fit_error;
    j["scaling"] = sc;
  }
  j["flow_histograms"] = {{"bins", r.spec.bins}, {"counts", r.flow.histograms}};
  return j;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return f;
}

inline void check_written(std::ofstream& f, const std::filesystem::path& p) {
  f.flush();
  if (!f) throw std::runtime_error("write to " + p.string() + " failed");
}

}  // namespace detail

inline void write_flow_csv(const std::filesystem::path& path, const FidelityFlow& f) {
  auto out = detail::open_out(path);
  out << "t,mean,q05,q25,q50,q75,q95\n";
  for (std::size_t g = 0; g < f.times.size(); ++g) {
    out << format_double(f.times[g]) << ',' << format_double(f.mean[g]);
    for (const auto& q : f.quantiles) out << ',' << format_double(q[g]);
    out << '\n';
  }
  detail::check_written(out, path);
}

inline void write_trajectories_jsonl(const std::filesystem::path& path, const std::vector<TrajectoryRecord>& recs) {
  auto out = detail::open_out(path);
  for (const auto& r : recs) out << to_json(r).dump() << '\n';
  detail::check_written(out, path);
}

inline std::vector<TrajectoryRecord> read_trajectories_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<TrajectoryRecord> recs;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) recs.push_back(trajectory_from_json(json::parse(line)));
  return recs;
}

/// Writes flow.csv, trajectories.jsonl and summary.json under dir.
inline void write_ensemble(const std::filesystem::path& dir, const EnsembleResult& r,
                           const std::optional<ScalingExperiment>& scaling = std::nullopt) {
  std::filesystem::create_directories(dir);
  write_flow_csv(dir / "flow.csv", r.flow);
  write_trajectories_jsonl(dir / "trajectories.jsonl", r.trajectories);
  const auto path = dir / "summary.json";
  auto out = detail::open_out(path);
  out << summary_to_json(r, scaling).dump(2) << '\n';
  detail::check_written(out, path);
}

}  // namespace qrd
