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

// Independent reference computations used only by the tests.

#pragma once

#include <cmath>

#include "qrd/core.hpp"

namespace qrd::oracle {

/// 30-term Taylor series with scaling and squaring.
inline Operator taylor_expm(const Operator& A, int terms = 30) {
  int s = 0;
  double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.5) {
    nrm *= 0.5;
    ++s;
  }
  const Operator B = A / std::pow(2.0, s);
  const auto d = A.rows();
  Operator sum = Operator::Identity(d, d);
  Operator term = Operator::Identity(d, d);
  for (int k = 1; k < terms; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Kronecker product built entry by entry from basis states.
inline Operator kron_by_basis(const Operator& a, const Operator& b) {
  const auto da = a.rows(), db = b.rows();
  Operator out(da * db, da * db);
  for (Eigen::Index i = 0; i < da * db; ++i)
    for (Eigen::Index j = 0; j < da * db; ++j) out(i, j) = a(i / db, j / db) * b(i % db, j % db);
  return out;
}

inline double max_abs_diff(const Operator& a, const Operator& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// |<a|b>| on normalized vectors, computed without the library helper.
inline double overlap(const Amplitudes& a, const Amplitudes& b) {
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return std::abs(s) / (a.norm() * b.norm());
}

}  // namespace qrd::oracle
