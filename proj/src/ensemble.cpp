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

#include "credx/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credx/error.hpp"
#include "credx/random.hpp"
#include "credx/stats.hpp"

namespace credx {
namespace {

void CheckTrainingShape(const Matrix& X, std::span<const int> y) {
  if (X.rows() == 0 || X.rows() != y.size()) {
    throw Error(ErrorCode::kShapeMismatch, "X and y disagree or are empty");
  }
}

double MeanLogLoss(std::span<const double> scores, std::span<const int> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) loss += Softplus(scores[i]) - y[i] * scores[i];
  return loss / static_cast<double>(y.size());
}

}  // namespace

TreeEnsembleModel::TreeEnsembleModel(ModelKind kind, std::vector<std::string> names,
                                     std::vector<Tree> trees, double base_score,
                                     double learning_rate)
    : ProbabilityModel(std::move(names)),
      kind_(kind),
      trees_(std::move(trees)),
      base_score_(base_score),
      learning_rate_(learning_rate) {
  if (kind_ != ModelKind::kForest && kind_ != ModelKind::kBoosted) {
    throw Error(ErrorCode::kInvalidArgument, "tree ensemble must be forest or boosted");
  }
  if (kind_ == ModelKind::kForest && trees_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "forest needs at least one tree");
  }
}

double TreeEnsembleModel::Predict(std::span<const double> row) const {
  double sum = 0.0;
  for (const Tree& t : trees_) sum += t.Predict(row);
  if (kind_ == ModelKind::kForest) {
    return std::clamp(sum / static_cast<double>(trees_.size()), 0.0, 1.0);
  }
  return Sigmoid(base_score_ + learning_rate_ * sum);
}

nlohmann::json TreeEnsembleModel::ParamsJson() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& t : trees_) trees.push_back(t.ToJson());
  return {{"trees", trees},
          {"base_score", base_score_},
          {"learning_rate", learning_rate_},
          {"loss_history", loss_history_}};
}

std::unique_ptr<TreeEnsembleModel> TreeEnsembleModel::FromParams(ModelKind kind,
                                                                 std::vector<std::string> names,
                                                                 const nlohmann::json& p) {
  std::vector<Tree> trees;
  for (const auto& t : p.at("trees")) trees.push_back(Tree::FromJson(t));
  auto m = std::make_unique<TreeEnsembleModel>(kind, std::move(names), std::move(trees),
                                               p.at("base_score").get<double>(),
                                               p.at("learning_rate").get<double>());
  if (p.contains("loss_history")) {
    m->set_loss_history(p["loss_history"].get<std::vector<double>>());
  }
  return m;
}

std::unique_ptr<TreeEnsembleModel> TrainForest(const Matrix& X, std::span<const int> y,
                                               std::vector<std::string> names,
                                               const ForestParams& params) {
  CheckTrainingShape(X, y);
  if (params.n_trees == 0) throw Error(ErrorCode::kInvalidArgument, "forest needs n_trees > 0");
  const std::size_t n = X.rows();
  std::vector<double> target(y.begin(), y.end());
  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  tree_params.min_samples_leaf = params.min_samples_leaf;
  tree_params.max_features =
      params.max_features != 0
          ? params.max_features
          : std::max<std::size_t>(1, static_cast<std::size_t>(
                                         std::floor(std::sqrt(static_cast<double>(X.cols())))));

  std::vector<Tree> trees(params.n_trees);
  const auto n_trees = static_cast<long>(params.n_trees);
  // Each tree owns a seed derived from (master seed, tree index), so the
  // forest is identical for any thread count.
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, params.jobs)) \
    if (params.jobs > 1)
  for (long t = 0; t < n_trees; ++t) {
    Rng rng(DeriveSeed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = UniformIndex(rng, n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees[static_cast<std::size_t>(t)] =
        BuildTree(X, target, rows, SplitCriterion::kGini, tree_params, rng);
  }
  return std::make_unique<TreeEnsembleModel>(ModelKind::kForest, std::move(names),
                                             std::move(trees), 0.0, 1.0);
}

std::unique_ptr<TreeEnsembleModel> TrainBoosted(const Matrix& X, std::span<const int> y,
                                                std::vector<std::string> names,
                                                const BoostedParams& params) {
  CheckTrainingShape(X, y);
  const std::size_t n = X.rows();
  const double prior = std::clamp(
      static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / static_cast<double>(n), 1e-6,
      1.0 - 1e-6);
  const double base = Logit(prior);
  std::vector<double> scores(n, base);
  std::vector<double> residual(n);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  tree_params.min_samples_leaf = params.min_samples_leaf;
  Rng rng(params.seed);

  std::vector<Tree> trees;
  std::vector<double> history{MeanLogLoss(scores, y)};
  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    // Negative gradient of the log-loss with respect to the score.
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - Sigmoid(scores[i]);
    Tree tree = BuildTree(X, residual, rows, SplitCriterion::kVariance, tree_params, rng);
    for (std::size_t i = 0; i < n; ++i) scores[i] += params.learning_rate * tree.Predict(X.row(i));
    trees.push_back(std::move(tree));
    history.push_back(MeanLogLoss(scores, y));
  }
  auto model = std::make_unique<TreeEnsembleModel>(ModelKind::kBoosted, std::move(names),
                                                   std::move(trees), base, params.learning_rate);
  model->set_loss_history(std::move(history));
  return model;
}

std::vector<FeatureScore> InformationGainImportance(const ProbabilityModel& model) {
  const auto* ensemble = dynamic_cast<const TreeEnsembleModel*>(&model);
  if (ensemble == nullptr) {
    throw Error(ErrorCode::kNotTreeBased, "information gain needs a forest or boosted model");
  }
  std::vector<double> gain(model.num_features(), 0.0);
  for (const Tree& t : ensemble->trees()) {
    for (const TreeNode& node : t.nodes()) {
      if (!node.is_leaf()) gain[static_cast<std::size_t>(node.feature)] += node.gain;
    }
  }
  const double total = std::accumulate(gain.begin(), gain.end(), 0.0);
  std::vector<FeatureScore> scores;
  for (std::size_t f = 0; f < gain.size(); ++f) {
    scores.push_back({f, model.feature_names()[f], total > 0 ? gain[f] / total : 0.0});
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const FeatureScore& a, const FeatureScore& b) { return a.score > b.score; });
  return scores;
}

}  // namespace credx
