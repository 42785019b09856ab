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

// Plot-ready datasets derived from explanation results. Nothing here renders
// images; every view serializes to JSON and CSV.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "credx/matrix.hpp"
#include "credx/model.hpp"
#include "credx/shap.hpp"

namespace credx {

// Tolerance for the local-accuracy re-check performed by every export.
inline constexpr double kExportLocalAccuracyTolerance = 1e-6;

struct SummaryFeature {
  std::size_t feature = 0;
  std::string name;
  double mean_abs_phi = 0.0;
};

struct SummaryPoint {
  std::size_t rank = 0;  // 0 = most important
  std::size_t instance = 0;
  double phi = 0.0;
  double value = 0.0;             // raw feature value
  double normalized_value = 0.0;  // min-max per feature; 0.5 for a constant column
};

struct SummaryData {
  std::vector<SummaryFeature> features;  // min(top_n, D), descending mean |phi|
  std::vector<SummaryPoint> points;      // rank-major, then instance order

  nlohmann::json ToJson() const;
  // Columns: rank, feature, name, instance, phi, value, normalized_value.
  void WriteCsv(std::ostream& out) const;
};

SummaryData MakeSummary(const ShapMatrix& sm, const Matrix& X_explain, std::size_t top_n = 20);

struct DependenceData {
  std::size_t feature = 0;
  std::size_t partner = 0;  // equals feature when D = 1
  std::string feature_name;
  std::string partner_name;
  std::vector<double> partner_scores;  // per candidate; 0 at `feature`
  struct Point {
    double x = 0.0;
    double phi = 0.0;
    double partner_x = 0.0;
  };
  std::vector<Point> points;

  nlohmann::json ToJson() const;
  // Columns: x, phi, partner_x.
  void WriteCsv(std::ostream& out) const;
};

// Count-weighted mean over decile bins of x_j of |corr(x_k, phi_j)| within
// the bin; undefined correlations count as 0.
double InteractionScore(std::span<const double> x_j, std::span<const double> phi_j,
                        std::span<const double> x_k);

// Partner is the highest-scoring other feature, ties to the lower index.
DependenceData MakeDependence(const ShapMatrix& sm, const Matrix& X_explain, std::size_t feature);

struct ForceSort {
  enum class Kind { kByOutput, kByFeature } kind = Kind::kByOutput;
  std::size_t feature = 0;

  static ForceSort ByOutput() { return {}; }
  static ForceSort ByFeature(std::size_t j) { return {Kind::kByFeature, j}; }
};

struct ForceInstance {
  std::size_t instance = 0;
  double base_value = 0.0;
  double fx = 0.0;
  std::optional<double> sort_value;  // the feature value under ByFeature
  std::vector<std::pair<std::size_t, double>> contributions;  // descending |phi|
};

struct ForceData {
  std::vector<std::string> feature_names;
  ForceSort sort;
  std::vector<ForceInstance> stack;  // stacking order

  nlohmann::json ToJson() const;
  // Long format. Columns: position, instance, base_value, fx, sort_value,
  // feature, name, phi.
  void WriteCsv(std::ostream& out) const;
};

// ByFeature needs X_explain. Throws LocalAccuracy when a row's contributions
// miss fx - base by more than the export tolerance.
ForceData MakeForce(const ShapMatrix& sm, ForceSort sort, const Matrix* X_explain = nullptr);

struct ImportanceRow {
  std::size_t feature = 0;
  std::string name;
  double gain = 0.0;  // normalized to sum 1 over all features
  double mean_abs_phi = 0.0;
  std::optional<std::size_t> gain_rank;  // within the top_n, 0-based
  std::optional<std::size_t> shap_rank;
};

struct ImportanceComparison {
  std::size_t top_n = 0;
  std::vector<ImportanceRow> rows;  // union of both top_n lists, by feature index
  double jaccard = 0.0;
  double spearman = 0.0;  // over the union rows
  double gain_top_share = 0.0;       // largest normalized gain
  double shap_top_share_of_top5 = 0.0;  // top mean |phi| over the top-5 sum

  nlohmann::json ToJson() const;
  // Columns: feature, name, gain, gain_rank, mean_abs_phi, shap_rank.
  void WriteCsv(std::ostream& out) const;
};

// `gain` comes from InformationGainImportance (which enforces a tree model).
ImportanceComparison CompareImportance(const std::vector<FeatureScore>& gain,
                                       const ShapMatrix& sm, std::size_t top_n = 20);

// "{model}_{explainer}_{view}.{ext}"
std::string ArtifactName(std::string_view model, std::string_view explainer,
                         std::string_view view, std::string_view ext);

}  // namespace credx
