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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "credx/matrix.hpp"
#include "credx/model.hpp"

namespace credx {

enum class DiscretizerKind { kQuartile, kNone };

struct LimeConfig {
  std::size_t n_samples = 5000;
  std::size_t top_k = 10;
  std::optional<double> kernel_width;  // nullopt: 0.75 * sqrt(D)
  DiscretizerKind discretizer = DiscretizerKind::kQuartile;
  double ridge_penalty = 1.0;
  std::uint64_t seed = 0;

  double ResolvedKernelWidth(std::size_t num_features) const;
};

struct BinStats {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

// How one training column is split into interpretable bins. Columns with at
// least four distinct values get quartile edges; the rest use their distinct
// values as bins ("categorical-like", which covers one-hot indicators).
struct FeatureBins {
  std::string name;
  bool categorical_like = false;
  std::vector<double> edges;        // quartile edges, strictly increasing
  std::vector<double> levels;       // categorical-like distinct values
  std::vector<double> frequencies;  // categorical-like level frequencies
  std::vector<BinStats> bins;
  double mean = 0.0;  // whole-column moments for undiscretized sampling
  double sd = 0.0;
};

class Discretizer {
 public:
  static Discretizer Fit(const Matrix& X_train, const std::vector<std::string>& names);

  // Bin index of `value`; a value on an edge falls in the lower bin.
  std::size_t Bin(std::size_t feature, double value) const;
  std::size_t num_bins(std::size_t feature) const { return features_[feature].bins.size(); }
  // Readable condition such as "total_pymnt > 13550.68".
  std::string Condition(std::size_t feature, std::size_t bin) const;

  std::size_t num_features() const { return features_.size(); }
  const FeatureBins& feature(std::size_t f) const { return features_[f]; }

 private:
  std::vector<FeatureBins> features_;
};

struct PerturbationSample {
  Matrix interpretable;  // binary (quartile mode) or standardized (no discretizer)
  Matrix raw;            // model-space rows
};

// Row 0 is the instance itself.
PerturbationSample SamplePerturbations(std::span<const double> x, const Discretizer& disc,
                                       const LimeConfig& config);

// exp(-d^2 / width^2), d = Euclidean distance of each interpretable row to row 0.
std::vector<double> ProximityWeights(const Matrix& interpretable, const LimeConfig& config);

struct SurrogateFit {
  std::vector<std::size_t> selected;  // sorted by |coefficient| descending
  std::vector<double> coefficients;   // aligned with `selected`
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> full_coefficients;  // stage-one ridge over all features
  double full_intercept = 0.0;
  double ridge_penalty = 0.0;  // penalty actually used after any escalation
};

// Weighted ridge over all features selects the top_k by |coefficient|, then a
// weighted ridge on those k alone gives the reported surrogate. A singular
// system escalates the penalty tenfold (from 1e-6 when it was zero) up to
// three times before throwing SingularSystem.
SurrogateFit FitSurrogate(const Matrix& interpretable, std::span<const double> targets,
                          std::span<const double> weights, const LimeConfig& config);

// Weighted ridge with unpenalized intercept; exposed for the surrogate's own
// tests. Throws SingularSystem after the escalation budget.
struct RidgeSolution {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double penalty = 0.0;
};
RidgeSolution WeightedRidge(const Matrix& Z, std::span<const std::size_t> columns,
                            std::span<const double> targets, std::span<const double> weights,
                            double penalty);

struct ExplanationEntry {
  std::string condition;
  std::size_t feature = 0;
  std::string feature_name;
  double weight = 0.0;  // > 0 pushes toward Default (class 1)
};

struct LocalExplanation {
  std::size_t instance_id = 0;
  int predicted_class = 0;
  double probability = 0.0;  // class 1
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<ExplanationEntry> entries;
  double top_k_sum = 0.0;     // sum of reported weights
  double full_ridge_sum = 0.0;  // sum of stage-one weights over all features

  nlohmann::json ToJson() const;
  // Two aligned columns: condition and signed weight, with the class each
  // sign favors.
  std::string RenderTable() const;
};

LocalExplanation ExplainInstance(const Predictor& model, std::span<const double> x,
                                 const Discretizer& disc, const LimeConfig& config,
                                 std::size_t instance_id = 0);

}  // namespace credx
