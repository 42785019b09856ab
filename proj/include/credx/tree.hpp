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

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

#include "credx/matrix.hpp"
#include "credx/random.hpp"

namespace credx {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output; class-1 fraction or mean target
  double gain = 0.0;   // impurity reduction of this split, >= 0
  std::size_t samples = 0;

  bool is_leaf() const { return feature < 0; }
};

enum class SplitCriterion {
  kGini,      // binary labels; gain in count-weighted Gini impurity
  kVariance,  // real targets; gain in sum of squared errors
};

struct TreeParams {
  std::size_t max_depth = 20;
  std::size_t max_features = 0;  // features tried per split; 0 means all
  std::size_t min_samples_leaf = 1;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  // Rows go left when x[feature] <= threshold.
  double Predict(std::span<const double> row) const;
  std::size_t depth() const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  nlohmann::json ToJson() const;
  static Tree FromJson(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

// CART growth on the given rows (duplicates allowed, e.g. a bootstrap
// sample). Candidate thresholds are midpoints between consecutive distinct
// values; a split is taken only if it strictly improves impurity. Ties between
// splits keep the first found (lower feature index, then lower threshold).
Tree BuildTree(const Matrix& X, std::span<const double> target,
               std::span<const std::size_t> rows, SplitCriterion criterion,
               const TreeParams& params, Rng& rng);

}  // namespace credx
