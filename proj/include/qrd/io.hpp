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

// JSON and text encodings shared by the ensemble runner and the CLI.

#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "qrd/depolarizing.hpp"
#include "qrd/gate.hpp"
#include "qrd/pauli_channel.hpp"
#include "qrd/teleport.hpp"

namespace qrd {

using json = nlohmann::json;

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  if (r.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf, r.ptr};
}

inline json amplitudes_to_json(const Amplitudes& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back({a[i].real(), a[i].imag()});
  return out;
}

inline Amplitudes amplitudes_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("amplitudes must be a nonempty array of [re, im]");
  Amplitudes a(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& z = j[i];
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
      throw std::invalid_argument("amplitude entries must be [re, im] number pairs");
    a[static_cast<Eigen::Index>(i)] = cplx(z[0].get<double>(), z[1].get<double>());
  }
  return a;
}

inline json to_json(const ChannelConfig& c) {
  return {{"P", c.P.str()}, {"mode", to_string(c.mode)}, {"p", c.p},   {"T", c.T},
          {"dt", c.dt},     {"seed", c.seed},            {"stepper", to_string(c.stepper)},
          {"reverse_noise", to_string(c.reverse_noise)}};
}

inline json to_json(const DepolarizingConfig& c) {
  return {{"mode", to_string(c.mode)}, {"p", c.p},       {"T", c.T},
          {"dt", c.dt},                {"seed", c.seed}, {"reverse_noise", to_string(c.reverse_noise)}};
}

inline json to_json(const GateConfig& c) {
  json j = {{"theta", c.theta}, {"P", c.P.str()}, {"p", c.p},      {"T", c.T},
            {"dt", c.dt},       {"seed", c.seed}, {"stepper", to_string(c.stepper)}};
  if (c.theta_sampler) {
    const auto& s = *c.theta_sampler;
    j["theta_sampler"] = {{"kind", s.kind == ThetaSampler::Kind::Point ? "point" : "uniform"},
                          {"lo", s.lo},
                          {"hi", s.hi}};
  }
  return j;
}

inline json to_json(const ResourceBudget& b) { return {{"epsilon", b.epsilon}, {"d", b.d}, {"delta", b.delta}}; }

inline json to_json(const ResourceLedger& l) {
  return {{"applications", l.applications},
          {"attempts", l.attempts},
          {"failures", l.failures},
          {"bell_pairs", l.bell_pairs},
          {"skipped", l.skipped},
          {"infeasible", l.infeasible},
          {"max_attempts", l.max_attempts},
          {"max_d_min", l.max_d_min},
          {"attempt_histogram", l.attempt_histogram}};
}

}  // namespace qrd
