// Copyright 2026 The Credx Authors. All Rights Reserved.
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

#include "credx/stats.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "credx/error.hpp"
#include "credx/random.hpp"

namespace credx {

double StandardNormal(Rng& rng) {
  double u1 = Uniform01(rng);
  while (u1 <= 0.0) u1 = Uniform01(rng);
  const double u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "Pearson: length mismatch");
  }
  const std::size_t n = a.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double ma = Mean(a);
  const double mb = Mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0 || sbb <= 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  return Pearson(ra, rb);
}

double SortedQuantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "quantile of empty data");
  }
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return SortedQuantile(v, 0.5);
}

double ChiSquareSurvival(double x, double df) {
  if (df <= 0) return 1.0;
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

ChiSquareResult ChiSquareTest(const std::vector<std::vector<double>>& table) {
  ChiSquareResult result;
  if (table.empty()) return result;
  const std::size_t cols = table.front().size();
  std::vector<double> row_sum(table.size(), 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (table[r].size() != cols) {
      throw Error(ErrorCode::kShapeMismatch, "ragged contingency table");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      row_sum[r] += table[r][c];
      col_sum[c] += table[r][c];
      total += table[r][c];
    }
  }
  const auto nonzero = [](const std::vector<double>& v) {
    return std::count_if(v.begin(), v.end(), [](double x) { return x > 0; });
  };
  const auto live_rows = nonzero(row_sum);
  const auto live_cols = nonzero(col_sum);
  if (live_rows < 2 || live_cols < 2) return result;
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double expected = row_sum[r] * col_sum[c] / total;
      if (expected <= 0) continue;
      const double d = table[r][c] - expected;
      result.statistic += d * d / expected;
    }
  }
  result.df = static_cast<double>((live_rows - 1) * (live_cols - 1));
  result.p_value = ChiSquareSurvival(result.statistic, result.df);
  return result;
}

}  // namespace credx
