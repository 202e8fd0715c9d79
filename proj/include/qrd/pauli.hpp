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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qrd {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Amplitudes = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Largest supported register. Dense algebra beyond this is out of scope.
inline constexpr std::size_t kMaxQubits = 4;

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Jump operator convention: L = P (weak measurement) or L = iP (unitary noise).
enum class Mode : std::uint8_t { Dissipative, Conserving };

inline std::string_view to_string(Mode m) {
  return m == Mode::Dissipative ? "dissipative" : "conserving";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "dissipative") return Mode::Dissipative;
  if (s == "conserving") return Mode::Conserving;
  throw std::invalid_argument("unknown mode '" + std::string(s) +
                              "' (expected dissipative|conserving)");
}

inline char axis_char(Axis a) { return "IXYZ"[static_cast<int>(a)]; }

/// Single-qubit Pauli product a*b = phase * c, phase in {1, i, -1, -i}
/// encoded as a power of i.
inline std::pair<int, Axis> multiply_axes(Axis a, Axis b) {
  if (a == Axis::I) return {0, b};
  if (b == Axis::I) return {0, a};
  if (a == b) return {0, Axis::I};
  const int ia = static_cast<int>(a), ib = static_cast<int>(b);
  const int c = 6 - ia - ib;  // the remaining axis of {1,2,3}
  // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {cyclic ? 1 : 3, static_cast<Axis>(c)};
}

/// An m-qubit Pauli word without phase. Qubit 0 is the leftmost factor of the
/// Kronecker product (the most significant bit of a basis index).
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Axis> word) : word_(std::move(word)) {
    if (word_.empty()) throw std::invalid_argument("Pauli word must have at least one qubit");
    if (word_.size() > kMaxQubits)
      throw std::invalid_argument("Pauli word longer than " + std::to_string(kMaxQubits) +
                                  " qubits");
  }

  static PauliString parse(std::string_view text) {
    std::vector<Axis> word;
    for (char ch : text) {
      switch (ch) {
        case 'I': case 'i': case '0': word.push_back(Axis::I); break;
        case 'X': case 'x': case '1': word.push_back(Axis::X); break;
        case 'Y': case 'y': case '2': word.push_back(Axis::Y); break;
        case 'Z': case 'z': case '3': word.push_back(Axis::Z); break;
        default:
          throw std::invalid_argument("invalid Pauli label '" + std::string(1, ch) + "' in '" +
                                      std::string(text) + "'");
      }
    }
    return PauliString(std::move(word));
  }

  static PauliString identity(std::size_t m) { return PauliString(std::vector<Axis>(m, Axis::I)); }

  std::size_t qubits() const { return word_.size(); }
  std::size_t dim() const { return std::size_t{1} << word_.size(); }
  Axis operator[](std::size_t u) const { return word_[u]; }
  const std::vector<Axis>& word() const { return word_; }

  std::string str() const {
    std::string s;
    for (Axis a : word_) s.push_back(axis_char(a));
    return s;
  }

  bool is_identity() const {
    for (Axis a : word_)
      if (a != Axis::I) return false;
    return true;
  }

  /// Two Pauli words commute iff they anticommute on an even number of qubits.
  bool commutes_with(const PauliString& other) const {
    check_same_size(other);
    int anti = 0;
    for (std::size_t u = 0; u < word_.size(); ++u) {
      const Axis a = word_[u], b = other.word_[u];
      if (a != Axis::I && b != Axis::I && a != b) ++anti;
    }
    return anti % 2 == 0;
  }

  /// Product this*other = i^phase * result.
  std::pair<int, PauliString> multiply(const PauliString& other) const {
    check_same_size(other);
    int phase = 0;
    std::vector<Axis> out(word_.size());
    for (std::size_t u = 0; u < word_.size(); ++u) {
      auto [ph, ax] = multiply_axes(word_[u], other.word_[u]);
      phase += ph;
      out[u] = ax;
    }
    return {phase % 4, PauliString(std::move(out))};
  }

  /// Bit masks for P = i^{#Y} X^x Z^z acting on basis indices.
  std::uint32_t x_mask() const { return mask([](Axis a) { return a == Axis::X || a == Axis::Y; }); }
  std::uint32_t z_mask() const { return mask([](Axis a) { return a == Axis::Z || a == Axis::Y; }); }
  int y_count() const {
    int n = 0;
    for (Axis a : word_) n += a == Axis::Y;
    return n;
  }

  /// out = P * in, without forming the dense matrix.
  void apply(const Amplitudes& in, Amplitudes& out) const {
    const std::uint32_t xm = x_mask(), zm = z_mask();
    static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx yphase = kPow[y_count() % 4];
    const auto n = static_cast<std::uint32_t>(in.size());
    out.resize(in.size());
    for (std::uint32_t b = 0; b < n; ++b) {
      const double sign = (__builtin_popcount(b & zm) & 1) ? -1.0 : 1.0;
      out[b ^ xm] = yphase * sign * in[b];
    }
  }

  Amplitudes apply(const Amplitudes& in) const {
    Amplitudes out;
    apply(in, out);
    return out;
  }

  /// <v|P|v> for a (not necessarily normalized) vector.
  cplx expectation(const Amplitudes& v) const { return v.dot(apply(v)); }

  bool operator==(const PauliString&) const = default;
  auto operator<=>(const PauliString&) const = default;

 private:
  template <class Pred>
  std::uint32_t mask(Pred pred) const {
    std::uint32_t m = 0;
    const std::size_t n = word_.size();
    for (std::size_t u = 0; u < n; ++u)
      if (pred(word_[u])) m |= 1u << (n - 1 - u);
    return m;
  }

  void check_same_size(const PauliString& other) const {
    if (other.word_.size() != word_.size())
      throw std::invalid_argument("Pauli words of different length: " + str() + " vs " +
                                  other.str());
  }

  std::vector<Axis> word_;
};

inline Operator single_qubit_pauli(Axis a) {
  Operator m(2, 2);
  switch (a) {
    case Axis::I: m << 1, 0, 0, 1; break;
    case Axis::X: m << 0, 1, 1, 0; break;
    case Axis::Y: m << 0, -kI, kI, 0; break;
    case Axis::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Dense Kronecker product of the single-qubit factors in word order.
inline Operator pauli_matrix(const PauliString& word) {
  Operator out = single_qubit_pauli(word[0]);
  for (std::size_t u = 1; u < word.qubits(); ++u) out = kron(out, single_qubit_pauli(word[u]));
  return out;
}

/// Levi-Civita symbol over axis indices 1..3 (0-based 0..2 here).
inline constexpr int levi_civita(int j, int k, int l) {
  if (j == k || k == l || j == l) return 0;
  return ((k - j + 3) % 3 == 1 && (l - k + 3) % 3 == 1) ? 1 : -1;
}

}  // namespace qrd
