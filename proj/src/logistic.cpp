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

#include <cmath>
#include <numeric>

#include "credx/error.hpp"
#include "credx/stats.hpp"

namespace credx {

LogisticModel::LogisticModel(std::vector<std::string> names, Standardizer standardizer,
                             std::vector<double> weights, double intercept)
    : ProbabilityModel(std::move(names)),
      standardizer_(std::move(standardizer)),
      weights_(std::move(weights)),
      intercept_(intercept) {
  if (weights_.size() != num_features() || standardizer_.mean.size() != num_features()) {
    throw Error(ErrorCode::kShapeMismatch, "logistic parameter sizes disagree");
  }
}

double LogisticModel::Score(std::span<const double> row) const {
  double z = intercept_;
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    z += weights_[c] * (row[c] - standardizer_.mean[c]) / standardizer_.scale[c];
  }
  return z;
}

double LogisticModel::Predict(std::span<const double> row) const { return Sigmoid(Score(row)); }

void LogisticModel::PredictBatch(const Matrix& X, std::span<double> out) const {
  // Fold the standardization into raw-scale weights once per batch.
  const auto raw = RawWeights();
  double offset = intercept_;
  for (std::size_t c = 0; c < raw.size(); ++c) offset -= raw[c] * standardizer_.mean[c];
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto row = X.row(r);
    out[r] = Sigmoid(std::inner_product(raw.begin(), raw.end(), row.begin(), offset));
  }
}

std::vector<double> LogisticModel::RawWeights() const {
  std::vector<double> raw(weights_.size());
  for (std::size_t c = 0; c < raw.size(); ++c) raw[c] = weights_[c] / standardizer_.scale[c];
  return raw;
}

nlohmann::json LogisticModel::ParamsJson() const {
  return {{"standardizer", standardizer_.ToJson()},
          {"weights", weights_},
          {"intercept", intercept_},
          {"iterations", iterations_}};
}

std::unique_ptr<LogisticModel> LogisticModel::FromParams(std::vector<std::string> names,
                                                         const nlohmann::json& p) {
  auto m = std::make_unique<LogisticModel>(std::move(names),
                                           Standardizer::FromJson(p.at("standardizer")),
                                           p.at("weights").get<std::vector<double>>(),
                                           p.at("intercept").get<double>());
  m->set_iterations(p.value("iterations", std::size_t{0}));
  return m;
}

double LogisticObjective(std::span<const double> theta, const Matrix& X, std::span<const int> y,
                         double l2, std::span<double> grad) {
  const std::size_t d = X.cols();
  const auto n = static_cast<double>(X.rows());
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto row = X.row(r);
    double z = theta[d];
    for (std::size_t c = 0; c < d; ++c) z += theta[c] * row[c];
    const double t = static_cast<double>(y[r]);
    loss += Softplus(z) - t * z;
    const double residual = Sigmoid(z) - t;
    for (std::size_t c = 0; c < d; ++c) grad[c] += residual * row[c];
    grad[d] += residual;
  }
  double penalty = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    grad[c] = grad[c] / n + l2 * theta[c];
    penalty += theta[c] * theta[c];
  }
  grad[d] /= n;
  return loss / n + 0.5 * l2 * penalty;
}

std::unique_ptr<LogisticModel> TrainLogistic(const Matrix& X, std::span<const int> y,
                                             std::vector<std::string> names,
                                             const LogisticParams& params) {
  if (X.rows() == 0 || X.rows() != y.size()) {
    throw Error(ErrorCode::kShapeMismatch, "logistic: X and y disagree or are empty");
  }
  const std::size_t d = X.cols();
  Standardizer standardizer = Standardizer::Fit(X);
  const Matrix Xs = standardizer.Apply(X);

  std::vector<double> theta(d + 1, 0.0);
  const double prior = std::clamp(
      static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / static_cast<double>(y.size()),
      1e-6, 1.0 - 1e-6);
  theta[d] = Logit(prior);

  std::vector<double> grad(d + 1), next(d + 1), next_grad(d + 1);
  double loss = LogisticObjective(theta, Xs, y, params.l2, grad);
  double step = 1.0;
  std::size_t iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFinite, "logistic loss is not finite");
    const double gnorm2 = std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    if (std::sqrt(gnorm2) < params.gradient_tolerance) break;
    // Armijo backtracking from a Barzilai-Borwein trial step.
    double next_loss = 0.0;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i <= d; ++i) next[i] = theta[i] - step * grad[i];
      next_loss = LogisticObjective(next, Xs, y, params.l2, next_grad);
      if (next_loss <= loss - 1e-4 * step * gnorm2) break;
      step *= 0.5;
    }
    double sy = 0.0, yy = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      const double s = next[i] - theta[i];
      const double dy = next_grad[i] - grad[i];
      sy += s * dy;
      yy += dy * dy;
    }
    step = (sy > 0 && yy > 0) ? sy / yy : 1.0;
    if (next_loss > loss) break;
    theta.swap(next);
    grad.swap(next_grad);
    loss = next_loss;
  }
  if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFinite, "logistic loss is not finite");

  std::vector<double> weights(theta.begin(), theta.begin() + static_cast<long>(d));
  auto model = std::make_unique<LogisticModel>(std::move(names), std::move(standardizer),
                                               std::move(weights), theta[d]);
  model->set_iterations(iter);
  return model;
}

}  // namespace credx
