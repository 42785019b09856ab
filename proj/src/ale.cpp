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

#include "credx/ale.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "credx/error.hpp"
#include "credx/stats.hpp"

namespace credx {

double AleCurve::ValueAt(double x) const {
  if (edges.empty()) return 0.0;
  if (x <= edges.front()) return edge_values.front();
  if (x >= edges.back()) return edge_values.back();
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const auto hi = static_cast<std::size_t>(it - edges.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - edges[lo]) / (edges[hi] - edges[lo]);
  return edge_values[lo] + t * (edge_values[hi] - edge_values[lo]);
}

double AleCurve::Range() const {
  if (edge_values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(edge_values.begin(), edge_values.end());
  return *hi - *lo;
}

nlohmann::json AleCurve::ToJson() const {
  return {{"feature", feature},       {"name", name},
          {"edges", edges},           {"effects", effects},
          {"counts", counts},         {"edge_values", edge_values},
          {"constant_feature", constant_feature}};
}

void AleCurve::WriteCsv(std::ostream& out) const {
  out << "interval,lower,upper,count,effect,lower_value,upper_value\n";
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out << fmt::format("{},{},{},{},{},{},{}\n", k, edges[k], edges[k + 1], counts[k], effects[k],
                       edge_values[k], edge_values[k + 1]);
  }
}

std::size_t IntervalOf(std::span<const double> edges, double v) {
  // First edge strictly >= v, minus one; v at edges[0] belongs to interval 0.
  const auto it = std::lower_bound(edges.begin() + 1, edges.end(), v);
  const auto k = static_cast<std::size_t>(it - edges.begin());
  return std::min(k, edges.size() - 1) - 1;
}

std::vector<double> IntervalEdges(std::span<const double> values, std::size_t n_intervals) {
  if (n_intervals < 2) throw Error(ErrorCode::kInvalidArgument, "ALE needs at least 2 intervals");
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "ALE needs data");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw Error(ErrorCode::kConstantFeature, "feature takes a single value");
  }
  std::vector<double> edges;
  for (std::size_t k = 0; k <= n_intervals; ++k) {
    edges.push_back(SortedQuantile(sorted, static_cast<double>(k) / static_cast<double>(n_intervals)));
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // Fold empty intervals into the next one (the last folds into its left).
  for (bool merged = true; merged && edges.size() > 2;) {
    merged = false;
    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (double v : sorted) ++counts[IntervalOf(edges, v)];
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] != 0) continue;
      const std::size_t drop = k + 1 < counts.size() ? k + 1 : k;
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(drop));
      merged = true;
      break;
    }
  }
  return edges;
}

AleCurve ComputeAle(const Predictor& model, const Matrix& X, std::size_t feature,
                    std::size_t n_intervals, std::string name) {
  if (X.cols() != model.num_features()) {
    throw Error(ErrorCode::kShapeMismatch, "data width differs from model feature count");
  }
  if (feature >= X.cols()) throw Error(ErrorCode::kInvalidArgument, "feature index out of range");
  AleCurve curve;
  curve.feature = feature;
  curve.name = name.empty() ? fmt::format("x{}", feature) : std::move(name);
  const std::vector<double> column = X.column(feature);
  try {
    curve.edges = IntervalEdges(column, n_intervals);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConstantFeature) throw;
    curve.edges = {column.front(), column.front()};
    curve.edge_values = {0.0, 0.0};
    curve.effects = {0.0};
    curve.counts = {column.size()};
    curve.constant_feature = true;
    return curve;
  }

  const std::size_t n = X.rows();
  const std::size_t B = curve.edges.size() - 1;
  std::vector<std::size_t> bin(n);
  curve.counts.assign(B, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bin[i] = IntervalOf(curve.edges, column[i]);
    ++curve.counts[bin[i]];
  }

  Matrix lower = X;
  Matrix upper = X;
  for (std::size_t i = 0; i < n; ++i) {
    lower(i, feature) = curve.edges[bin[i]];
    upper(i, feature) = curve.edges[bin[i] + 1];
  }
  std::vector<double> f_lo(n), f_hi(n);
  model.PredictBatch(lower, f_lo);
  model.PredictBatch(upper, f_hi);

  std::vector<double> delta(B, 0.0);
  for (std::size_t i = 0; i < n; ++i) delta[bin[i]] += f_hi[i] - f_lo[i];
  curve.edge_values.assign(B + 1, 0.0);
  for (std::size_t k = 0; k < B; ++k) {
    const double mean = curve.counts[k] ? delta[k] / static_cast<double>(curve.counts[k]) : 0.0;
    curve.edge_values[k + 1] = curve.edge_values[k] + mean;
  }

  // Center so the interpolated curve averages to zero over the data.
  std::vector<double> at_point(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    at_point[i] = curve.ValueAt(column[i]);
    total += at_point[i];
  }
  const double center = total / static_cast<double>(n);
  for (double& v : curve.edge_values) v -= center;
  curve.effects.assign(B, 0.0);
  for (std::size_t i = 0; i < n; ++i) curve.effects[bin[i]] += at_point[i] - center;
  for (std::size_t k = 0; k < B; ++k) curve.effects[k] /= static_cast<double>(curve.counts[k]);
  return curve;
}

}  // namespace credx
