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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "credx/background.hpp"
#include "credx/matrix.hpp"
#include "credx/model.hpp"

namespace credx {

// Attribution of f(x) - base_value over the D input features.
struct ShapResult {
  std::vector<double> phi;
  double base_value = 0.0;
  double fx = 0.0;

  // |base + sum(phi) - fx|
  double LocalAccuracyGap() const;
};

// Largest D for which the exhaustive coalition regression is permitted.
inline constexpr std::size_t kMaxExhaustiveFeatures = 13;
// Largest D accepted by the enumeration oracle.
inline constexpr std::size_t kMaxExactFeatures = 15;

struct ShapConfig {
  // Coalitions evaluated per instance; nullopt uses min(2^D, 2D + 2048).
  // Budgets covering all 2^D - 2 proper coalitions switch to exhaustive.
  std::optional<std::size_t> n_coalitions;
  bool exhaustive = false;
  std::uint64_t seed = 0;
};

std::size_t DefaultCoalitionBudget(std::size_t num_features);

// Shapley kernel weight (M-1) / (C(M,s) s (M-s)); DomainError unless 0 < s < M.
double CoalitionWeight(std::size_t M, std::size_t s);

// Interventional expectation: features with mask[j] != 0 come from x, the
// rest from each background row, averaged with the background weights.
double MaskedPrediction(const Predictor& model, std::span<const double> x,
                        std::span<const std::uint8_t> mask, const Background& bg);

// Full 2^D enumeration of the Shapley formula. D <= 15.
ShapResult ExactShapley(const Predictor& model, std::span<const double> x,
                        const Background& bg);

// Weighted least squares over coalitions with the empty and full coalition
// constraints eliminated by substitution, so local accuracy is exact up to
// rounding in both exhaustive and sampled modes.
ShapResult KernelShap(const Predictor& model, std::span<const double> x, const Background& bg,
                      const ShapConfig& config);

struct ShapMatrix {
  std::vector<std::string> feature_names;
  std::vector<ShapResult> results;
  std::vector<double> seconds;  // wall clock per row; excluded from artifacts

  std::size_t rows() const { return results.size(); }
  std::size_t cols() const { return feature_names.size(); }
  double phi(std::size_t r, std::size_t j) const { return results[r].phi[j]; }
  double MaxLocalAccuracyGap() const;
  std::vector<double> MeanAbsPhi() const;

  nlohmann::json ToJson() const;
  static ShapMatrix FromJson(const nlohmann::json& j);
  // Columns: features..., base_value, fx.
  void WriteCsv(std::ostream& out) const;
  // Columns: row, seconds.
  void WriteTimingCsv(std::ostream& out) const;
};

using ShapProgress = std::function<void(std::size_t done, std::size_t total)>;

// Row r is explained with seed DeriveSeed(config.seed, r), so results do not
// depend on `jobs`.
ShapMatrix ComputeShapMatrix(const Predictor& model, const Matrix& X_explain,
                             const Background& bg, const ShapConfig& config,
                             std::vector<std::string> names, int jobs = 1,
                             const ShapProgress& progress = {});

// Feature indices of the `n` largest values, ties to the lower index.
std::vector<std::size_t> TopFeatures(std::span<const double> scores, std::size_t n);
double Jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace credx
