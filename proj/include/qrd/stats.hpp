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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace qrd {

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Linear-interpolation quantile of an ascending sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, q);
}

//---------------------------------------------------------------------------//
// Kolmogorov-Smirnov
//---------------------------------------------------------------------------//

/// Survival function of the Kolmogorov distribution,
/// Q(l) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 l^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // Small-argument form converges faster: Q = 1 - sqrt(2 pi)/l sum exp(-(2j-1)^2 pi^2 / (8 l^2)).
    const double y = std::exp(-1.2337005501361697 / (lambda * lambda));  // pi^2/8
    const double s = y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49);
    return std::clamp(1.0 - 2.5066282746310002 / lambda * s, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.01;
  bool reject = false;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and the
/// small-sample correction lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.alpha = alpha;
  const double en = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
  r.reject = r.p_value < alpha;
  return r;
}

//---------------------------------------------------------------------------//
// Chi-square homogeneity
//---------------------------------------------------------------------------//

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool reject = false;
};

/// Pearson test that the rows of a contingency table share one distribution.
/// Columns with zero total are dropped.
inline ChiSquareResult chi_square_homogeneity(const std::vector<std::vector<double>>& table, double alpha = 0.01) {
  if (table.size() < 2) throw std::invalid_argument("chi-square homogeneity needs at least two rows");
  const std::size_t cols = table[0].size();
  for (const auto& row : table)
    if (row.size() != cols) throw std::invalid_argument("chi-square table rows differ in length");
  std::vector<double> row_sum(table.size(), 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      row_sum[r] += table[r][c];
      col_sum[c] += table[r][c];
      total += table[r][c];
    }
  if (!(total > 0.0)) throw std::invalid_argument("chi-square table is empty");
  ChiSquareResult res;
  std::size_t used_cols = 0;
  for (std::size_t c = 0; c < cols; ++c) {
    if (col_sum[c] <= 0.0) continue;
    ++used_cols;
    for (std::size_t r = 0; r < table.size(); ++r) {
      const double e = row_sum[r] * col_sum[c] / total;
      if (e > 0.0) res.statistic += (table[r][c] - e) * (table[r][c] - e) / e;
    }
  }
  res.dof = static_cast<int>((table.size() - 1) * (used_cols > 0 ? used_cols - 1 : 0));
  if (res.dof == 0) {
    res.p_value = 1.0;
  } else {
    const boost::math::chi_squared dist(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  }
  res.reject = res.p_value < alpha;
  return res;
}

//---------------------------------------------------------------------------//
// Power-law fits
//---------------------------------------------------------------------------//

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual in log space
};

/// Ordinary least squares of log y on log x.
inline ScalingFit loglog_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("log-log fit needs at least two points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("log-log fit requires positive values");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double mx = mean(lx), my = mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("log-log fit needs distinct abscissae");
  ScalingFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / static_cast<double>(lx.size()));
  return f;
}

/// Fit of deficits 1 - mean fidelity against pT.
inline ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("scaling_fit needs at least three points");
  for (const auto& pt : points)
    if (!(pt.second > 0.0)) throw std::invalid_argument("scaling_fit: nonpositive deficit");
  return loglog_fit(points);
}

}  // namespace qrd
