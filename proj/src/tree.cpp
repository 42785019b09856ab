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

#include "credx/tree.hpp"

#include <algorithm>
#include <numeric>

#include "credx/error.hpp"

namespace credx {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double sse_reduction = 0.0;
};

class Builder {
 public:
  Builder(const Matrix& X, std::span<const double> target, SplitCriterion criterion,
          const TreeParams& params, Rng& rng)
      : X_(X), target_(target), criterion_(criterion), params_(params), rng_(rng) {
    features_.resize(X.cols());
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  std::vector<TreeNode> Run(std::vector<std::size_t> rows) {
    Grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int Grow(std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r : rows) {
      sum += target_[r];
      sum_sq += target_[r] * target_[r];
    }
    const auto n = static_cast<double>(rows.size());
    nodes_[id].samples = rows.size();
    nodes_[id].value = rows.empty() ? 0.0 : sum / n;
    const double sse = sum_sq - sum * sum / std::max(n, 1.0);

    if (depth >= params_.max_depth || rows.size() < 2 * params_.min_samples_leaf ||
        sse <= 1e-12 * std::max(1.0, sum_sq)) {
      return id;
    }
    const Split split = FindSplit(rows, sum);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (X_(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    nodes_[id].gain = criterion_ == SplitCriterion::kGini ? 2.0 * split.sse_reduction
                                                          : split.sse_reduction;
    const int l = Grow(left, depth + 1);
    const int r = Grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<std::size_t> CandidateFeatures() {
    const std::size_t d = features_.size();
    const std::size_t k =
        params_.max_features == 0 ? d : std::min(params_.max_features, d);
    if (k == d) return features_;
    std::vector<std::size_t> pool = features_;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + UniformIndex(rng_, d - i)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  // For binary targets the SSE equals n * p * (1 - p), half the
  // count-weighted Gini impurity, so one scan serves both criteria.
  Split FindSplit(const std::vector<std::size_t>& rows, double total_sum) {
    Split best;
    const auto n = static_cast<double>(rows.size());
    const double parent_term = total_sum * total_sum / n;
    std::vector<std::pair<double, double>> pairs(rows.size());
    for (std::size_t f : CandidateFeatures()) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        pairs[i] = {X_(rows[i], f), target_[rows[i]]};
      }
      std::sort(pairs.begin(), pairs.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (pairs.front().first == pairs.back().first) continue;
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
        left_sum += pairs[i].second;
        if (pairs[i].first == pairs[i + 1].first) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = pairs.size() - n_left;
        if (n_left < params_.min_samples_leaf || n_right < params_.min_samples_leaf) continue;
        const double right_sum = total_sum - left_sum;
        // SSE_parent - SSE_left - SSE_right; the sum-of-squares terms cancel.
        const double reduction = left_sum * left_sum / static_cast<double>(n_left) +
                                 right_sum * right_sum / static_cast<double>(n_right) -
                                 parent_term;
        if (reduction > best.sse_reduction + 1e-12) {
          double threshold = 0.5 * (pairs[i].first + pairs[i + 1].first);
          if (!(threshold < pairs[i + 1].first)) threshold = pairs[i].first;
          best = {static_cast<int>(f), threshold, reduction};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const double> target_;
  SplitCriterion criterion_;
  TreeParams params_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

double Tree::Predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& node = nodes_[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold
                                     ? node.left
                                     : node.right);
  }
  return nodes_[i].value;
}

std::size_t Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children always follow their parent in the node array.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

nlohmann::json Tree::ToJson() const {
  nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                 left = nlohmann::json::array(), right = nlohmann::json::array(),
                 value = nlohmann::json::array(), gain = nlohmann::json::array(),
                 samples = nlohmann::json::array();
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    gain.push_back(n.gain);
    samples.push_back(n.samples);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},   {"right", right},
          {"value", value},     {"gain", gain},           {"samples", samples}};
}

Tree Tree::FromJson(const nlohmann::json& j) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const auto gain = j.at("gain").get<std::vector<double>>();
  const auto samples = j.at("samples").get<std::vector<std::size_t>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n ||
      gain.size() != n || samples.size() != n || n == 0) {
    throw Error(ErrorCode::kFormat, "malformed tree");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i], gain[i], samples[i]};
    if (!nodes[i].is_leaf() && (left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) ||
                                left[i] >= static_cast<int>(n) || right[i] >= static_cast<int>(n))) {
      throw Error(ErrorCode::kFormat, "tree child index out of range");
    }
  }
  return Tree(std::move(nodes));
}

Tree BuildTree(const Matrix& X, std::span<const double> target,
               std::span<const std::size_t> rows, SplitCriterion criterion,
               const TreeParams& params, Rng& rng) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot grow a tree on zero rows");
  Builder builder(X, target, criterion, params, rng);
  return Tree(builder.Run(std::vector<std::size_t>(rows.begin(), rows.end())));
}

}  // namespace credx
