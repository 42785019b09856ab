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

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace credx {

inline double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double Logit(double p) { return std::log(p / (1.0 - p)); }

double Mean(std::span<const double> v);

// Pearson correlation; returns NaN when either input has zero variance.
double Pearson(std::span<const double> a, std::span<const double> b);

// Spearman rank correlation with average ranks for ties.
double Spearman(std::span<const double> a, std::span<const double> b);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> AverageRanks(std::span<const double> v);

// Quantile of already sorted data using linear interpolation between order
// statistics: position p * (n - 1).
double SortedQuantile(std::span<const double> sorted, double p);

double Median(std::vector<double> v);

// Upper tail P(X >= x) of the chi-square distribution with `df` degrees of
// freedom, i.e. the regularized upper incomplete gamma Q(df/2, x/2).
double ChiSquareSurvival(double x, double df);

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Pearson chi-square independence test on a levels x classes contingency
// table. Cells with zero expected count are skipped; a table with fewer than
// two non-empty rows or columns has df 0 and p-value 1.
ChiSquareResult ChiSquareTest(const std::vector<std::vector<double>>& table);

}  // namespace credx
