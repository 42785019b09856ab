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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "credx/matrix.hpp"
#include "credx/model.hpp"

namespace credx {

inline constexpr std::size_t kDefaultAleIntervals = 20;

// First-order accumulated local effects for one feature. Interval 0 is
// [edges[0], edges[1]]; interval k > 0 is (edges[k], edges[k+1]].
struct AleCurve {
  std::size_t feature = 0;
  std::string name;
  std::vector<double> edges;        // B + 1, strictly increasing
  std::vector<double> edge_values;  // centered accumulated effect at each edge
  std::vector<double> effects;      // B, centered curve averaged over each interval's points
  std::vector<std::size_t> counts;  // B
  bool constant_feature = false;

  std::size_t intervals() const { return counts.size(); }
  // Linear interpolation of edge_values, clamped outside the edge range.
  double ValueAt(double x) const;
  // Max minus min of edge_values.
  double Range() const;

  nlohmann::json ToJson() const;
  // Columns: interval, lower, upper, count, effect, lower_value, upper_value.
  void WriteCsv(std::ostream& out) const;
};

// Quantile edges with duplicates merged and empty intervals folded into a
// neighbour. Throws ConstantFeature when all values are equal.
std::vector<double> IntervalEdges(std::span<const double> values,
                                  std::size_t n_intervals = kDefaultAleIntervals);

// Interval index of v under the convention documented on AleCurve; values
// outside the edge range clamp to the first or last interval.
std::size_t IntervalOf(std::span<const double> edges, double v);

// A constant column yields an identically zero curve with one interval.
AleCurve ComputeAle(const Predictor& model, const Matrix& X, std::size_t feature,
                    std::size_t n_intervals = kDefaultAleIntervals, std::string name = {});

}  // namespace credx
