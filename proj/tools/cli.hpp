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

// Command-line front end. Settings come from a flat JSON config and from
// flags; both are collected as JSON objects keyed by engine config field
// names, and flags win.

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrd/acceptance.hpp"
#include "qrd/ensemble.hpp"

namespace qrd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitVerify = 3;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"forward", "reverse",  "sme",      "depol-forward", "depol-reverse",
                                             "gate",    "teleport", "ensemble", "verify"};
  return c;
}

//---------------------------------------------------------------------------//
// Settings
//---------------------------------------------------------------------------//

enum class Kind { Number, Unsigned, String, Bool, NumberList, UnsignedList, Amplitudes, Sampler };

inline const std::map<std::string, Kind>& setting_kinds() {
  static const std::map<std::string, Kind> k = {
      {"P", Kind::String},           {"mode", Kind::String},
      {"p", Kind::Number},           {"T", Kind::Number},
      {"dt", Kind::Number},          {"seed", Kind::Unsigned},
      {"stepper", Kind::String},     {"reverse_noise", Kind::String},
      {"theta", Kind::Number},       {"theta_sampler", Kind::Sampler},
      {"epsilon", Kind::Number},     {"d", Kind::Unsigned},
      {"delta", Kind::Number},       {"traj", Kind::Unsigned},
      {"out", Kind::String},         {"workers", Kind::Unsigned},
      {"engine", Kind::String},      {"n_traj", Kind::Unsigned},
      {"time_grid", Kind::NumberList}, {"grid_points", Kind::Unsigned},
      {"bins", Kind::Unsigned},      {"store_increments", Kind::Bool},
      {"store_states", Kind::String}, {"psi0", Kind::Amplitudes},
      {"scaling_pT", Kind::NumberList}, {"scheme", Kind::String},
      {"only", Kind::UnsignedList},
  };
  return k;
}

/// Throws std::invalid_argument on unknown keys or mistyped values.
inline void check_settings(const json& s) {
  if (!s.is_object()) throw std::invalid_argument("config must be a JSON object");
  const auto& kinds = setting_kinds();
  for (const auto& [key, v] : s.items()) {
    const auto it = kinds.find(key);
    if (it == kinds.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    auto bad = [&](const char* what) { throw std::invalid_argument("config key '" + key + "': expected " + what); };
    switch (it->second) {
      case Kind::Number:
        if (!v.is_number()) bad("a number");
        break;
      case Kind::Unsigned:
        if (!v.is_number_unsigned()) bad("a non-negative integer");
        break;
      case Kind::String:
        if (!v.is_string()) bad("a string");
        break;
      case Kind::Bool:
        if (!v.is_boolean()) bad("true or false");
        break;
      case Kind::NumberList:
        if (!v.is_array()) bad("an array of numbers");
        for (const auto& x : v)
          if (!x.is_number()) bad("an array of numbers");
        break;
      case Kind::UnsignedList:
        if (!v.is_array()) bad("an array of non-negative integers");
        for (const auto& x : v)
          if (!x.is_number_unsigned()) bad("an array of non-negative integers");
        break;
      case Kind::Amplitudes:
        (void)amplitudes_from_json(v);
        break;
      case Kind::Sampler: {
        if (!v.is_object()) bad("an object {kind, lo, hi}");
        for (const auto& [k, x] : v.items()) {
          if (k == "kind" ? !x.is_string() : (k == "lo" || k == "hi") ? !x.is_number() : true)
            bad("an object {kind: point|uniform, lo, hi}");
        }
        break;
      }
    }
  }
}

inline json load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed config " + path.string() + ": " + e.what());
  }
  check_settings(j);
  return j;
}

inline SmeScheme parse_scheme(std::string_view s) {
  if (s == "euler") return SmeScheme::Euler;
  if (s == "ito-product") return SmeScheme::ItoProduct;
  if (s == "exact") return SmeScheme::Exact;
  throw std::invalid_argument("unknown SME scheme '" + std::string(s) + "' (expected euler|ito-product|exact)");
}

inline std::string_view to_string(SmeScheme s) {
  switch (s) {
    case SmeScheme::Euler: return "euler";
    case SmeScheme::ItoProduct: return "ito-product";
    case SmeScheme::Exact: return "exact";
  }
  return "?";
}

inline ThetaSampler sampler_from_json(const json& j) {
  const std::string kind = j.value("kind", "uniform");
  if (kind == "point") return ThetaSampler::point(j.at("lo").get<double>());
  if (kind == "uniform") return ThetaSampler::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  throw std::invalid_argument("theta_sampler kind must be point or uniform");
}

/// Fully resolved settings for one invocation.
struct RunConfig {
  std::string command;
  ChannelConfig channel;
  DepolarizingConfig depolarizing;
  GateConfig gate;
  ResourceBudget budget;
  std::uint64_t traj = 0;
  std::filesystem::path out = "qrd-out";
  bool out_given = false;
  unsigned workers = 1;
  std::optional<Amplitudes> psi0;
  std::optional<SmeScheme> scheme;  // unset: matches the stepper
  EnsembleSpec ensemble;
  std::vector<double> scaling_pT;
  std::set<int> only;

  SmeScheme sme_scheme() const {
    return scheme.value_or(channel.stepper == Stepper::Exact ? SmeScheme::Exact : SmeScheme::ItoProduct);
  }

  std::size_t qubits() const {
    if (command == "depol-forward" || command == "depol-reverse") return 1;
    if (command == "gate") return gate.P.qubits();
    return channel.P.qubits();
  }

  void validate() const {
    if (command == "forward" || command == "reverse" || command == "sme") channel.validate();
    else if (command == "depol-forward") depolarizing.validate();
    else if (command == "depol-reverse") depolarizing.validate_reverse();
    else if (command == "gate") gate.validate();
    else if (command == "teleport") TeleportConfig{channel, budget}.validate();
    else if (command == "ensemble") ensemble.validate();
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (psi0 && command != "ensemble" && static_cast<std::size_t>(psi0->size()) != (std::size_t{1} << qubits()))
      throw std::invalid_argument("psi0 dimension does not match the Pauli word");
    for (double x : scaling_pT)
      if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("scaling_pT entries must lie in (0, 1)");
    if (!scaling_pT.empty() && ensemble.engine != Engine::Depolarizing)
      throw std::invalid_argument("scaling_pT requires engine depolarizing");
  }
};

inline RunConfig resolve(const std::string& command, const json& s) {
  check_settings(s);
  RunConfig rc;
  rc.command = command;
  auto has = [&](const char* k) { return s.contains(k); };
  auto num = [&](const char* k) { return s.at(k).get<double>(); };
  auto str = [&](const char* k) { return s.at(k).get<std::string>(); };

  if (has("P")) rc.channel.P = rc.gate.P = PauliString::parse(str("P"));
  if (has("mode")) rc.channel.mode = rc.depolarizing.mode = parse_mode(str("mode"));
  if (has("p")) rc.channel.p = rc.depolarizing.p = rc.gate.p = num("p");
  if (has("T")) rc.channel.T = rc.depolarizing.T = rc.gate.T = num("T");
  if (has("dt")) rc.channel.dt = rc.depolarizing.dt = rc.gate.dt = num("dt");
  if (has("seed")) rc.channel.seed = rc.depolarizing.seed = rc.gate.seed = s["seed"].get<std::uint64_t>();
  if (has("stepper")) rc.channel.stepper = rc.gate.stepper = parse_stepper(str("stepper"));
  if (has("reverse_noise"))
    rc.channel.reverse_noise = rc.depolarizing.reverse_noise = parse_reverse_noise(str("reverse_noise"));
  if (has("theta")) rc.gate.theta = num("theta");
  if (has("theta_sampler")) rc.gate.theta_sampler = sampler_from_json(s["theta_sampler"]);
  if (has("epsilon")) rc.budget.epsilon = num("epsilon");
  if (has("d")) {
    const auto d = s["d"].get<std::uint64_t>();
    if (d > kMaxAttempts) throw std::invalid_argument("budget d must lie in [1, 64]");
    rc.budget.d = static_cast<unsigned>(d);
  }
  if (has("delta")) rc.budget.delta = num("delta");
  if (has("traj")) rc.traj = s["traj"].get<std::uint64_t>();
  if (has("out")) {
    rc.out = str("out");
    rc.out_given = true;
  }
  if (has("workers")) {
    const auto w = s["workers"].get<std::uint64_t>();
    if (w < 1 || w > 1024) throw std::invalid_argument("workers must lie in [1, 1024]");
    rc.workers = static_cast<unsigned>(w);
  }
  if (has("psi0")) rc.psi0 = amplitudes_from_json(s["psi0"]);
  if (has("scheme")) rc.scheme = parse_scheme(str("scheme"));
  if (has("scaling_pT")) rc.scaling_pT = s["scaling_pT"].get<std::vector<double>>();
  if (has("only"))
    for (auto id : s["only"].get<std::vector<std::uint64_t>>()) rc.only.insert(static_cast<int>(id));

  EnsembleSpec& e = rc.ensemble;
  if (has("engine")) e.engine = parse_engine(str("engine"));
  e.channel = rc.channel;
  e.depolarizing = rc.depolarizing;
  e.gate = rc.gate;
  e.budget = rc.budget;
  e.base_seed = rc.channel.seed;
  e.workers = rc.workers;
  e.psi0 = rc.psi0;
  if (has("n_traj")) e.n_traj = s["n_traj"].get<std::size_t>();
  if (has("time_grid")) e.time_grid = s["time_grid"].get<std::vector<double>>();
  if (has("grid_points")) e.grid_points = s["grid_points"].get<std::size_t>();
  if (has("bins")) e.bins = s["bins"].get<std::size_t>();
  if (has("store_increments")) e.store_increments = s["store_increments"].get<bool>();
  if (has("store_states")) e.store_states = parse_state_dump(str("store_states"));
  return rc;
}

//---------------------------------------------------------------------------//
// Single-trajectory commands
//---------------------------------------------------------------------------//

inline QuantumState initial_state(const RunConfig& rc) {
  if (rc.psi0) return QuantumState(QuantumState(*rc.psi0).normalized());
  NoiseStream s(rc.channel.seed, rc.traj, channel::kInitial);
  return random_state(rc.qubits(), s);
}

/// Record of a forward-only run with every state stored.
inline TrajectoryRecord forward_record(const std::string& engine, const RunConfig& rc, const QuantumState& psi0,
                                       const TrajectoryResult& r) {
  TrajectoryRecord rec;
  rec.index = rc.traj;
  rec.seed = rc.channel.seed;
  rec.engine = engine;
  rec.dt = r.dt;
  rec.psi0 = psi0.amplitudes();
  rec.segments.push_back(detail::segment_of("forward", r));
  for (std::size_t k = 0; k < r.states.size(); ++k) {
    rec.state_times.push_back(r.time(k));
    rec.states.push_back(r.states[k].normalized());
    rec.fidelity.push_back(fidelity(r.states[k], psi0));
  }
  rec.terminal_fidelity = r.terminal_fidelity;
  return rec;
}

/// Full forward/reverse path through the ensemble machinery, all states kept.
inline detail::Outcome path_outcome(const RunConfig& rc, Engine engine, const QuantumState& psi0) {
  EnsembleSpec spec = rc.ensemble;
  spec.engine = engine;
  spec.psi0 = psi0.amplitudes();
  spec.n_traj = 1;
  spec.time_grid.clear();
  spec.grid_points = spec.path_steps() + 1;
  spec.store_increments = true;
  spec.store_states = StateDump::All;
  spec.validate();
  return detail::run_one(spec, spec.grid_indices(), rc.traj);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto f = detail::open_out(path);
  f << text;
  detail::check_written(f, path);
}

inline void write_fidelity_csv(const std::filesystem::path& path, const TrajectoryRecord& r) {
  std::ostringstream os;
  os << "t,fidelity\n";
  // A failed teleport run stores states only up to the failing step.
  const std::size_t n = std::min(r.fidelity.size(), r.state_times.size());
  for (std::size_t k = 0; k < n; ++k)
    os << format_double(r.state_times[k]) << ',' << format_double(r.fidelity[k]) << '\n';
  write_text(path, os.str());
}

inline json config_echo(const RunConfig& rc) {
  json c;
  if (rc.command == "depol-forward" || rc.command == "depol-reverse") c = to_json(rc.depolarizing);
  else if (rc.command == "gate") c = to_json(rc.gate);
  else c = to_json(rc.channel);
  if (rc.command == "teleport") c["budget"] = to_json(rc.budget);
  if (rc.command == "sme") c["scheme"] = to_string(rc.sme_scheme());
  c["traj"] = rc.traj;
  return c;
}

/// Writes trajectory.jsonl, fidelity.csv and summary.json.
inline void write_single(const RunConfig& rc, const TrajectoryRecord& rec, json summary) {
  std::filesystem::create_directories(rc.out);
  write_trajectories_jsonl(rc.out / "trajectory.jsonl", {rec});
  write_fidelity_csv(rc.out / "fidelity.csv", rec);
  summary["command"] = rc.command;
  summary["config"] = config_echo(rc);
  summary["psi0"] = amplitudes_to_json(rec.psi0);
  summary["terminal_fidelity"] = rec.terminal_fidelity ? json(*rec.terminal_fidelity) : json(nullptr);
  write_text(rc.out / "summary.json", summary.dump(2) + "\n");
}

inline std::string fidelity_text(const TrajectoryRecord& rec) {
  return rec.terminal_fidelity ? format_double(*rec.terminal_fidelity) : std::string("n/a");
}

inline int run_single(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const QuantumState psi0 = initial_state(rc);
  const std::string& cmd = rc.command;
  json summary = json::object();
  TrajectoryRecord rec;
  int code = kExitOk;

  if (cmd == "forward") {
    const auto r = run_forward(rc.channel, psi0, rc.traj);
    rec = forward_record("channel", rc, psi0, r);
    summary["W_T"] = r.record.W(0);
  } else if (cmd == "depol-forward") {
    const auto r = run_depol_forward(rc.depolarizing, psi0, rc.traj);
    rec = forward_record("depolarizing", rc, psi0, r);
    summary["W_T"] = {r.record.W(0), r.record.W(1), r.record.W(2)};
  } else if (cmd == "reverse" || cmd == "sme") {
    rec = path_outcome(rc, Engine::Channel, psi0).record;
  } else if (cmd == "depol-reverse") {
    rec = path_outcome(rc, Engine::Depolarizing, psi0).record;
  } else if (cmd == "gate") {
    rec = path_outcome(rc, Engine::Gate, psi0).record;
    summary["theta"] = rec.theta ? json(*rec.theta) : json(nullptr);
    summary["max_drift_strength"] = rec.max_drift_strength ? json(*rec.max_drift_strength) : json(nullptr);
  } else if (cmd == "teleport") {
    auto o = path_outcome(rc, Engine::Teleport, psi0);
    rec = std::move(o.record);
    summary["failed"] = rec.failed;
    summary["failed_step"] = rec.failed_step ? json(*rec.failed_step) : json(nullptr);
    summary["teleport_ledger"] = to_json(o.ledger);
    if (rec.failed) {
      err << "teleport: attempt budget d=" << rc.budget.d << " exhausted at reverse step " << *rec.failed_step
          << "\n";
      code = kExitBudget;
    }
  }

  if (cmd == "sme") {
    // Rerun the forward segment to get the exact terminal state and record.
    const ChannelConfig& c = rc.channel;
    const auto fwd = run_forward(c, psi0, rc.traj);
    const auto sme = run_sme_reverse(c, project_density(fwd.terminal()), fwd.record.W(0), rc.sme_scheme(), rc.traj);
    const std::size_t n = fwd.steps();
    std::ostringstream os;
    os << "t,sme_fidelity,trace_distance\n";
    double last_td = 0.0, last_f = 0.0;
    for (std::size_t k = 0; k < sme.states.size(); ++k) {
      const Operator rho = sme.states[k].normalized();
      const Amplitudes pure = rec.states.at(n + k);
      last_f = std::sqrt(std::max(0.0, (psi0.amplitudes().adjoint() * rho * psi0.amplitudes()).value().real()));
      last_td = trace_distance(rho, project_density(pure).entries());
      os << format_double(c.T + static_cast<double>(k) * c.dt) << ',' << format_double(last_f) << ','
         << format_double(last_td) << '\n';
    }
    std::filesystem::create_directories(rc.out);
    write_text(rc.out / "sme.csv", os.str());
    summary["sme_terminal_fidelity"] = last_f;
    summary["sme_trace_distance"] = last_td;
  }

  write_single(rc, rec, summary);
  out << cmd << ": " << (rec.state_times.empty() ? 0 : rec.state_times.size() - 1) << " steps, terminal fidelity "
      << fidelity_text(rec) << " -> " << rc.out.string() << "\n";
  return code;
}

//---------------------------------------------------------------------------//
// Ensemble and verify
//---------------------------------------------------------------------------//

inline int run_ensemble_command(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const auto result = run_ensemble(rc.ensemble);
  std::optional<ScalingExperiment> scaling;
  if (!rc.scaling_pT.empty()) scaling = run_depol_scaling(rc.ensemble, rc.scaling_pT);
  write_ensemble(rc.out, result, scaling);
  const auto& s = result.summary;
  out << "ensemble: " << to_string(rc.ensemble.engine) << ", " << s.n_traj << " trajectories, " << s.completed
      << " completed, mean terminal fidelity " << format_double(s.terminal_mean) << " -> " << rc.out.string() << "\n";
  if (scaling) {
    if (scaling->fit) out << "scaling: slope " << format_double(scaling->fit->slope) << "\n";
    else out << "scaling: " << scaling->fit_error << "\n";
  }
  if (s.completed < s.n_traj) {
    err << "ensemble: " << (s.n_traj - s.completed) << " of " << s.n_traj
        << " teleport runs exhausted the attempt budget\n";
    return kExitBudget;
  }
  return kExitOk;
}

inline int run_verify(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  acceptance::Options opt;
  opt.workers = rc.workers;
  opt.only = rc.only;
  const auto results = acceptance::run(opt, [&](const acceptance::CriterionResult& r) {
    out << acceptance::format(r) << std::endl;
  });
  std::size_t passed = 0;
  json j = json::array();
  for (const auto& r : results) {
    passed += r.pass ? 1 : 0;
    j.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"details", r.details}, {"seconds", r.seconds}});
  }
  out << passed << "/" << results.size() << " criteria passed\n";
  if (rc.out_given) {
    std::filesystem::create_directories(rc.out);
    write_text(rc.out / "verify.json", j.dump(2) + "\n");
  }
  if (passed != results.size()) {
    err << "verify: " << (results.size() - passed) << " criteria failed\n";
    return kExitVerify;
  }
  return kExitOk;
}

inline int execute(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  rc.validate();
  if (rc.command == "verify") return run_verify(rc, out, err);
  if (rc.command == "ensemble") return run_ensemble_command(rc, out, err);
  return run_single(rc, out, err);
}

//---------------------------------------------------------------------------//
// Argument parsing
//---------------------------------------------------------------------------//

struct Parsed {
  std::string command;
  json flags = json::object();
  std::optional<std::filesystem::path> config;
};

inline void add_flags(CLI::App& sub, Parsed& ps) {
  auto number = [&](const std::string& flag, const std::string& key, const std::string& help) {
    sub.add_option_function<double>(flag, [&ps, key](const double& v) { ps.flags[key] = v; }, help);
  };
  auto count = [&](const std::string& flag, const std::string& key, const std::string& help) {
    sub.add_option_function<std::uint64_t>(flag, [&ps, key](const std::uint64_t& v) { ps.flags[key] = v; }, help);
  };
  auto text = [&](const std::string& flag, const std::string& key, const std::string& help) {
    sub.add_option_function<std::string>(flag, [&ps, key](const std::string& v) { ps.flags[key] = v; }, help);
  };
  auto numbers = [&](const std::string& flag, const std::string& key, const std::string& help) {
    sub.add_option_function<std::vector<double>>(
           flag, [&ps, key](const std::vector<double>& v) { ps.flags[key] = v; }, help)
        ->delimiter(',');
  };

  number("--p", "p", "noise strength");
  number("--T", "T", "forward duration");
  number("--dt", "dt", "time step");
  count("--seed", "seed", "base seed");
  count("--traj", "traj", "trajectory index");
  text("--pauli", "P", "Pauli word, e.g. X or ZX");
  text("--mode", "mode", "dissipative|conserving");
  number("--theta", "theta", "gate angle");
  number("--epsilon", "epsilon", "teleport target failure probability");
  count("--d", "d", "teleport attempt budget");
  number("--delta", "delta", "resource-state post-selection failure probability");
  text("--out", "out", "output directory");
  count("--workers", "workers", "worker threads");
  text("--stepper", "stepper", "exact|em");
  text("--reverse-noise", "reverse_noise", "detector|innovation");
  text("--scheme", "scheme", "SME scheme: euler|ito-product|exact");
  text("--engine", "engine", "ensemble engine: channel|depolarizing|gate|teleport");
  count("--n-traj", "n_traj", "ensemble size");
  numbers("--time-grid", "time_grid", "comma-separated output times");
  count("--grid-points", "grid_points", "uniform output times when no grid is given");
  count("--bins", "bins", "fidelity histogram bins");
  text("--states", "store_states", "none|grid|all");
  numbers("--scaling-pT", "scaling_pT", "comma-separated pT values for the depolarizing scaling fit");
  sub.add_flag_function("--no-increments", [&ps](std::int64_t) { ps.flags["store_increments"] = false; },
                        "omit measurement increments from trajectories.jsonl");
  sub.add_option_function<std::string>(
      "--psi0",
      [&ps](const std::string& v) {
        try {
          ps.flags["psi0"] = json::parse(v);
        } catch (const json::parse_error&) {
          throw CLI::ValidationError("--psi0", "expected JSON [[re, im], ...]");
        }
      },
      "initial state as JSON [[re, im], ...]");
  sub.add_option_function<std::vector<std::uint64_t>>(
         "--only", [&ps](const std::vector<std::uint64_t>& v) { ps.flags["only"] = v; }, "verify: criteria ids")
      ->delimiter(',');
  sub.add_option_function<std::string>(
      "--config", [&ps](const std::string& v) { ps.config = v; }, "JSON config; flags override its values");
}

/// Full entry point; args exclude the program name.
inline int main(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Parsed ps;
  CLI::App app{"qrd: quantum trajectory reversal simulator", "qrd"};
  app.require_subcommand(1, 1);
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c);
    add_flags(*sub, ps);
    sub->callback([&ps, c] { ps.command = c; });
    subs[c] = sub;
  }
  subs["forward"]->description("forward trajectory of a single Pauli channel");
  subs["reverse"]->description("forward then reverse trajectory of a single Pauli channel");
  subs["sme"]->description("reverse stochastic master equation alongside the pure-state reverse run");
  subs["depol-forward"]->description("forward depolarizing trajectory");
  subs["depol-reverse"]->description("forward then reverse depolarizing trajectory (pT < 1)");
  subs["gate"]->description("bridge-driven gate on [T, 2T]");
  subs["teleport"]->description("reverse trajectory realised by repeated teleportation");
  subs["ensemble"]->description("trajectory ensemble with fidelity flow and summary statistics");
  subs["verify"]->description("run the acceptance suite");

  std::vector<const char*> argv = {"qrd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "qrd: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    json settings = ps.config ? load_config(*ps.config) : json::object();
    settings.update(ps.flags);
    return execute(resolve(ps.command, settings), out, err);
  } catch (const InfeasibleBudget& e) {
    err << "qrd " << ps.command << ": " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "qrd " << ps.command << ": " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "qrd " << ps.command << ": invalid setting: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "qrd " << ps.command << ": " << e.what() << "\n";
  }
  return kExitInvalid;
}

}  // namespace qrd::cli
