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
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

#include "qrd/pauli.hpp"

namespace qrd {

/// Unnormalized pure state. The physical vector is exp(log_norm) * amplitudes;
/// the amplitude vector is rescaled whenever its norm leaves [1e-6, 1e6].
class QuantumState {
 public:
  QuantumState() = default;
  explicit QuantumState(Amplitudes amplitudes, double log_norm = 0.0)
      : amps_(std::move(amplitudes)), log_norm_(log_norm) {
    const auto n = static_cast<std::size_t>(amps_.size());
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("state dimension must be a power of two >= 2");
  }

  /// Computational basis state |index> on m qubits.
  static QuantumState basis(std::size_t qubits, std::size_t index) {
    Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(std::size_t{1} << qubits));
    a[static_cast<Eigen::Index>(index)] = 1.0;
    return QuantumState(std::move(a));
  }

  Eigen::Index dim() const { return amps_.size(); }
  std::size_t qubits() const {
    std::size_t m = 0;
    while ((Eigen::Index{1} << m) < amps_.size()) ++m;
    return m;
  }

  const Amplitudes& amplitudes() const { return amps_; }
  Amplitudes& amplitudes() { return amps_; }
  double log_norm_offset() const { return log_norm_; }

  /// log of the reconstructed norm.
  double log_norm() const { return log_norm_ + std::log(amps_.norm()); }
  double norm() const { return std::exp(log_norm_) * amps_.norm(); }

  /// Unit-norm view. Throws on a zero vector.
  Amplitudes normalized() const {
    const double n = amps_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("state has zero or non-finite norm");
    return amps_ / n;
  }

  /// Multiply by exp(log_factor) without touching the amplitudes.
  void scale_log(double log_factor) { log_norm_ += log_factor; }

  void rescale() {
    const double n = amps_.norm();
    if (n > 0.0 && std::isfinite(n) && (n < 1e-6 || n > 1e6)) {
      amps_ /= n;
      log_norm_ += std::log(n);
    }
  }

  /// Drop the accumulated scale, keeping only the direction.
  void normalize() {
    amps_ = normalized();
    log_norm_ = 0.0;
  }

 private:
  Amplitudes amps_;
  double log_norm_ = 0.0;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Operator entries) : rho_(std::move(entries)) {
    if (rho_.rows() != rho_.cols()) throw std::invalid_argument("density matrix must be square");
  }

  const Operator& entries() const { return rho_; }
  Operator& entries() { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

  double trace() const { return rho_.trace().real(); }

  Operator normalized() const {
    const double tr = trace();
    if (!(tr > 0.0)) throw std::domain_error("density matrix has non-positive trace");
    return rho_ / tr;
  }

  bool is_hermitian(double tol = 1e-12) const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  void symmetrize() { rho_ = 0.5 * (rho_ + rho_.adjoint()); }

 private:
  Operator rho_;
};

/// Stable coefficients of exp(b P) = c*I + s*P with the real growth factored
/// out: exp(bP) = exp(|Re b|) * (c*I + s*P).
struct PauliExpCoeffs {
  cplx c;
  cplx s;
  double log_scale;
};

inline PauliExpCoeffs pauli_exp_coeffs(cplx b) {
  const double shift = std::abs(b.real());
  const cplx ep = std::exp(b - shift);
  const cplx em = std::exp(-b - shift);
  return {0.5 * (ep + em), 0.5 * (ep - em), shift};
}

/// exp(a I + b P) = e^a (cosh b I + sinh b P). Exact because P^2 = I.
inline Operator exp_affine_pauli(cplx a, cplx b, const PauliString& P) {
  const auto k = pauli_exp_coeffs(b);
  const cplx pre = std::exp(a + k.log_scale);
  if (!std::isfinite(pre.real()) || !std::isfinite(pre.imag()))
    throw std::overflow_error("exp_affine_pauli: scalar factor overflows; apply to a state instead");
  const auto d = static_cast<Eigen::Index>(P.dim());
  return pre * (k.c * Operator::Identity(d, d) + k.s * pauli_matrix(P));
}

/// In-place |psi> <- exp(a I + b P)|psi>, the real growth absorbed into the
/// state's log-norm so nothing overflows.
inline void apply_exp_affine_pauli(QuantumState& psi, cplx a, cplx b, const PauliString& P) {
  const auto k = pauli_exp_coeffs(b);
  const Amplitudes Pv = P.apply(psi.amplitudes());
  psi.amplitudes() = std::exp(cplx(0.0, a.imag())) * (k.c * psi.amplitudes() + k.s * Pv);
  psi.scale_log(a.real() + k.log_scale);
  psi.rescale();
}

inline std::array<Operator, 3> pauli_axes() {
  return {single_qubit_pauli(Axis::X), single_qubit_pauli(Axis::Y), single_qubit_pauli(Axis::Z)};
}

/// sinh(r)/r and cosh(r) for the principal square root r of r2. Both are even
/// in r, so the branch does not matter.
inline std::pair<cplx, cplx> cosh_sinhc(cplx r2) {
  const cplx r = std::sqrt(r2);
  if (std::abs(r) < 1e-6) {
    return {1.0 + r2 / 2.0 + r2 * r2 / 24.0, 1.0 + r2 / 6.0 + r2 * r2 / 120.0};
  }
  return {std::cosh(r), std::sinh(r) / r};
}

/// exp(c0 I + sum_k c_k sigma_k) for one qubit.
inline Operator exp_pauli_vector(cplx c0, const std::array<cplx, 3>& c) {
  const cplx r2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
  const auto [ch, shc] = cosh_sinhc(r2);
  const auto s = pauli_axes();
  Operator out = ch * Operator::Identity(2, 2);
  for (int k = 0; k < 3; ++k) out += shc * c[k] * s[k];
  return std::exp(c0) * out;
}

/// |<a|b>| on normalized views.
inline double fidelity(const Amplitudes& a, const Amplitudes& b) {
  if (a.size() != b.size()) throw std::invalid_argument("fidelity: dimension mismatch");
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw std::domain_error("fidelity: zero-norm state");
  return std::min(1.0, std::abs(a.dot(b)) / (na * nb));
}

inline double fidelity(const QuantumState& a, const QuantumState& b) {
  return fidelity(a.amplitudes(), b.amplitudes());
}

inline DensityMatrix project_density(const Amplitudes& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw std::domain_error("project_density: zero-norm state");
  const Amplitudes u = v / n;
  return DensityMatrix(u * u.adjoint());
}

inline DensityMatrix project_density(const QuantumState& s) { return project_density(s.amplitudes()); }

/// Half the trace norm of a - b (both Hermitian).
inline double trace_distance(const Operator& a, const Operator& b) {
  const Operator d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qrd
