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
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "credx/matrix.hpp"
#include "credx/tree.hpp"

namespace credx {

// Anything explainers can query: a scalar output per feature row. Trained
// classifiers return class-1 probabilities; tests and score-scale analyses
// wrap plain functions.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::size_t num_features() const = 0;
  virtual double Predict(std::span<const double> row) const = 0;
  // Row-by-row unless overridden. `out` has X.rows() entries.
  virtual void PredictBatch(const Matrix& X, std::span<double> out) const;
};

class FunctionPredictor final : public Predictor {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  FunctionPredictor(std::size_t num_features, Fn fn)
      : num_features_(num_features), fn_(std::move(fn)) {}

  std::size_t num_features() const override { return num_features_; }
  double Predict(std::span<const double> row) const override { return fn_(row); }

 private:
  std::size_t num_features_;
  Fn fn_;
};

enum class ModelKind { kLogistic, kForest, kBoosted, kSvmLinear, kMlp };

std::string_view ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);

// Per-column affine scaling to mean 0 / sd 1; zero-variance columns keep
// scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Fit(const Matrix& X);
  void Apply(std::span<const double> row, std::span<double> out) const;
  Matrix Apply(const Matrix& X) const;
  nlohmann::json ToJson() const;
  static Standardizer FromJson(const nlohmann::json& j);
};

// The probability contract every explainer consumes. Immutable once trained.
class ProbabilityModel : public Predictor {
 public:
  explicit ProbabilityModel(std::vector<std::string> feature_names)
      : feature_names_(std::move(feature_names)) {}

  virtual ModelKind kind() const = 0;
  std::size_t num_features() const override { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  // Class-1 probability per row; throws ShapeMismatch on a column count
  // that differs from the training feature count.
  std::vector<double> PredictProba(const Matrix& X) const;

  nlohmann::json ToJson() const;

 protected:
  virtual nlohmann::json ParamsJson() const = 0;

 private:
  std::vector<std::string> feature_names_;
};

std::unique_ptr<ProbabilityModel> ModelFromJson(const nlohmann::json& j);
void SaveModel(const ProbabilityModel& model, const std::filesystem::path& path);
std::unique_ptr<ProbabilityModel> LoadModel(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticParams {
  double l2 = 1e-3;
  std::size_t max_iterations = 5000;
  double gradient_tolerance = 1e-6;
};

class LogisticModel final : public ProbabilityModel {
 public:
  LogisticModel(std::vector<std::string> names, Standardizer standardizer,
                std::vector<double> weights, double intercept);

  ModelKind kind() const override { return ModelKind::kLogistic; }
  double Predict(std::span<const double> row) const override;
  void PredictBatch(const Matrix& X, std::span<double> out) const override;

  // Linear score on the raw (unstandardized) feature scale.
  double Score(std::span<const double> row) const;
  // Weights in raw feature units, i.e. d score / d x_j.
  std::vector<double> RawWeights() const;
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  std::size_t iterations() const { return iterations_; }
  void set_iterations(std::size_t n) { iterations_ = n; }

  static std::unique_ptr<LogisticModel> FromParams(std::vector<std::string> names,
                                                   const nlohmann::json& p);

 protected:
  nlohmann::json ParamsJson() const override;

 private:
  Standardizer standardizer_;
  std::vector<double> weights_;
  double intercept_;
  std::size_t iterations_ = 0;
};

// Mean binary cross-entropy plus (l2 / 2) * |w|^2 at theta = (w..., b) on
// already standardized X. Writes the analytic gradient into `grad`.
double LogisticObjective(std::span<const double> theta, const Matrix& X,
                         std::span<const int> y, double l2, std::span<double> grad);

std::unique_ptr<LogisticModel> TrainLogistic(const Matrix& X, std::span<const int> y,
                                             std::vector<std::string> names,
                                             const LogisticParams& params = {});

// ---------------------------------------------------------------------------
// Tree ensembles

struct ForestParams {
  std::size_t n_trees = 500;
  std::size_t max_depth = 20;
  std::size_t max_features = 0;  // 0 selects floor(sqrt(D))
  std::size_t min_samples_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct BoostedParams {
  std::size_t n_rounds = 100;
  std::size_t max_depth = 4;
  double learning_rate = 0.1;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

class TreeEnsembleModel final : public ProbabilityModel {
 public:
  // Forest: mean of leaf probabilities. Boosted: sigmoid(base_score +
  // learning_rate * sum of leaf values).
  TreeEnsembleModel(ModelKind kind, std::vector<std::string> names, std::vector<Tree> trees,
                    double base_score, double learning_rate);

  ModelKind kind() const override { return kind_; }
  double Predict(std::span<const double> row) const override;

  const std::vector<Tree>& trees() const { return trees_; }
  double base_score() const { return base_score_; }
  // Training log-loss after each boosting round (empty for forests).
  const std::vector<double>& loss_history() const { return loss_history_; }
  void set_loss_history(std::vector<double> h) { loss_history_ = std::move(h); }

  static std::unique_ptr<TreeEnsembleModel> FromParams(ModelKind kind,
                                                       std::vector<std::string> names,
                                                       const nlohmann::json& p);

 protected:
  nlohmann::json ParamsJson() const override;

 private:
  ModelKind kind_;
  std::vector<Tree> trees_;
  double base_score_;
  double learning_rate_;
  std::vector<double> loss_history_;
};

std::unique_ptr<TreeEnsembleModel> TrainForest(const Matrix& X, std::span<const int> y,
                                               std::vector<std::string> names,
                                               const ForestParams& params = {});
std::unique_ptr<TreeEnsembleModel> TrainBoosted(const Matrix& X, std::span<const int> y,
                                                std::vector<std::string> names,
                                                const BoostedParams& params = {});

struct FeatureScore {
  std::size_t feature = 0;
  std::string name;
  double score = 0.0;
};

// Per-feature sum of split gains over all trees, normalized to sum 1 and
// sorted descending (ties by feature index). Throws NotTreeBased.
std::vector<FeatureScore> InformationGainImportance(const ProbabilityModel& model);

// ---------------------------------------------------------------------------
// Linear SVM

enum class SvmProbabilityMethod {
  kPlatt,       // sigmoid(a * d + b) fitted on a held-out fold
  kRawSigmoid,  // sigmoid(d)
};

struct SvmParams {
  double c = 1.0;
  std::size_t epochs = 50;
  double calibration_fraction = 0.2;
  SvmProbabilityMethod method = SvmProbabilityMethod::kPlatt;
  std::uint64_t seed = 0;
};

class SvmModel final : public ProbabilityModel {
 public:
  SvmModel(std::vector<std::string> names, Standardizer standardizer, std::vector<double> w,
           double b, double platt_a, double platt_b, SvmProbabilityMethod method);

  ModelKind kind() const override { return ModelKind::kSvmLinear; }
  double Predict(std::span<const double> row) const override;

  // Signed distance-like decision value w . x + b on standardized inputs.
  double Decision(std::span<const double> row) const;
  double Probability(double decision, SvmProbabilityMethod method) const;

  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }
  double platt_a() const { return platt_a_; }
  double platt_b() const { return platt_b_; }
  SvmProbabilityMethod method() const { return method_; }

  static std::unique_ptr<SvmModel> FromParams(std::vector<std::string> names,
                                              const nlohmann::json& p);

 protected:
  nlohmann::json ParamsJson() const override;

 private:
  Standardizer standardizer_;
  std::vector<double> w_;
  double b_;
  double platt_a_;
  double platt_b_;
  SvmProbabilityMethod method_;
};

std::unique_ptr<SvmModel> TrainSvmLinear(const Matrix& X, std::span<const int> y,
                                         std::vector<std::string> names,
                                         const SvmParams& params = {});

// Probability mapping of an SVM's decision values; NotAnSvm for other kinds.
std::vector<double> SvmProbabilityMap(const ProbabilityModel& model, const Matrix& X,
                                      SvmProbabilityMethod method);

struct PlattFit {
  double a = 1.0;
  double b = 0.0;
};

// Fits sigmoid(a * d + b) to labels by cross-entropy with Platt's smoothed
// targets (N+ + 1) / (N+ + 2) and 1 / (N- + 2).
PlattFit FitPlatt(std::span<const double> decisions, std::span<const int> y);

// ---------------------------------------------------------------------------
// Multilayer perceptron

struct MlpParams {
  std::vector<std::size_t> hidden = {35, 35};
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool zero_init = false;
  std::uint64_t seed = 0;
};

// Parameters are one flat vector: for every layer, weights (out x in,
// row-major) followed by biases.
class MlpModel final : public ProbabilityModel {
 public:
  MlpModel(std::vector<std::string> names, Standardizer standardizer,
           std::vector<std::size_t> layer_sizes, std::vector<double> params);

  ModelKind kind() const override { return ModelKind::kMlp; }
  double Predict(std::span<const double> row) const override;

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  const std::vector<double>& params() const { return params_; }
  // Mean training loss after each epoch.
  const std::vector<double>& loss_history() const { return loss_history_; }
  void set_loss_history(std::vector<double> h) { loss_history_ = std::move(h); }

  static std::unique_ptr<MlpModel> FromParams(std::vector<std::string> names,
                                              const nlohmann::json& p);

 protected:
  nlohmann::json ParamsJson() const override;

 private:
  Standardizer standardizer_;
  std::vector<std::size_t> layer_sizes_;  // input, hidden..., 1
  std::vector<double> params_;
  std::vector<double> loss_history_;
};

std::size_t MlpParamCount(std::span<const std::size_t> layer_sizes);

// Output logit for one (standardized) row.
double MlpForward(std::span<const std::size_t> layer_sizes, std::span<const double> params,
                  std::span<const double> row);

// Mean binary cross-entropy over the rows of X (standardized); analytic
// gradient by backpropagation into `grad`.
double MlpLossAndGradient(std::span<const std::size_t> layer_sizes,
                          std::span<const double> params, const Matrix& X,
                          std::span<const int> y, std::span<double> grad);

std::unique_ptr<MlpModel> TrainMlp(const Matrix& X, std::span<const int> y,
                                   std::vector<std::string> names, const MlpParams& params = {});

}  // namespace credx
