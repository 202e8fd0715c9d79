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

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qrd/stochastic.hpp"

namespace qrd {

/// Exact: per-step closed-form exponentials. EulerMaruyama: the literal SDE.
enum class Stepper : std::uint8_t { Exact, EulerMaruyama };

inline std::string_view to_string(Stepper s) { return s == Stepper::Exact ? "exact" : "em"; }

inline Stepper parse_stepper(std::string_view s) {
  if (s == "exact") return Stepper::Exact;
  if (s == "em" || s == "euler" || s == "euler-maruyama") return Stepper::EulerMaruyama;
  throw std::invalid_argument("unknown stepper '" + std::string(s) + "' (expected exact|em)");
}

/// Number of dt steps in a span, rejecting spans that are not a whole number
/// of steps.
inline std::size_t whole_steps(double span, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(span > 0.0)) throw std::invalid_argument("time span must be positive");
  const double n = span / dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-6 * std::max(1.0, r))
    throw std::invalid_argument("time span is not an integer number of steps");
  return static_cast<std::size_t>(r);
}

/// States sampled at t0 + n*dt, n = 0..steps, with the record that drove them.
/// Record driving the reverse segment. Detector: the reverse state's own
/// signal plus a fresh Wiener increment. Innovation: the Wiener increment alone.
enum class ReverseNoise : std::uint8_t { Detector, Innovation };

inline std::string_view to_string(ReverseNoise r) { return r == ReverseNoise::Detector ? "detector" : "innovation"; }

inline ReverseNoise parse_reverse_noise(std::string_view s) {
  if (s == "detector") return ReverseNoise::Detector;
  if (s == "innovation") return ReverseNoise::Innovation;
  throw std::invalid_argument("unknown reverse noise '" + std::string(s) + "' (expected detector|innovation)");
}

struct TrajectoryResult {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<QuantumState> states;
  MeasurementRecord record;
  std::optional<double> terminal_fidelity;

  // Engine-specific extras.
  std::optional<double> theta;                 // gate runs
  double max_drift_strength = 0.0;             // gate runs: max |H_hat| along the path
  std::vector<std::uint32_t> attempts;         // teleport runs: attempts per step
  std::size_t failures = 0;                    // teleport runs: exhausted budgets

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
  double time(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }
  const QuantumState& terminal() const { return states.back(); }
};

}  // namespace qrd
