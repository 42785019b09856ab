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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credx/error.hpp"
#include "credx/model.hpp"
#include "credx/random.hpp"
#include "credx/stats.hpp"

namespace credx {
namespace {

std::vector<std::size_t> LayerSizes(std::size_t inputs, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

// Activations per layer for one row; acts[0] is the input, the last entry
// holds the output logit.
void Forward(std::span<const std::size_t> sizes, std::span<const double> params,
             std::span<const double> row, std::vector<std::vector<double>>& acts) {
  acts.resize(sizes.size());
  acts[0].assign(row.begin(), row.end());
  std::size_t offset = 0;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const std::size_t in = sizes[l - 1], out = sizes[l];
    const double* W = params.data() + offset;
    const double* b = W + in * out;
    acts[l].resize(out);
    const bool hidden = l + 1 < sizes.size();
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) z += W[o * in + i] * acts[l - 1][i];
      acts[l][o] = hidden ? std::max(0.0, z) : z;
    }
    offset += in * out + out;
  }
}

}  // namespace

std::size_t MlpParamCount(std::span<const std::size_t> layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    n += layer_sizes[l - 1] * layer_sizes[l] + layer_sizes[l];
  }
  return n;
}

double MlpForward(std::span<const std::size_t> layer_sizes, std::span<const double> params,
                  std::span<const double> row) {
  std::vector<std::vector<double>> acts;
  Forward(layer_sizes, params, row, acts);
  return acts.back()[0];
}

double MlpLossAndGradient(std::span<const std::size_t> sizes, std::span<const double> params,
                          const Matrix& X, std::span<const int> y, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t layers = sizes.size();
  std::vector<std::size_t> offsets(layers, 0);
  for (std::size_t l = 1; l < layers; ++l) {
    offsets[l] = offsets[l - 1] + (l > 1 ? sizes[l - 2] * sizes[l - 1] + sizes[l - 1] : 0);
  }
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, prev_delta;
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    Forward(sizes, params, X.row(r), acts);
    const double z = acts.back()[0];
    const double t = static_cast<double>(y[r]);
    loss += Softplus(z) - t * z;
    delta.assign(1, Sigmoid(z) - t);
    for (std::size_t l = layers - 1; l >= 1; --l) {
      const std::size_t in = sizes[l - 1], out = sizes[l];
      const double* W = params.data() + offsets[l];
      double* gW = grad.data() + offsets[l];
      double* gb = gW + in * out;
      for (std::size_t o = 0; o < out; ++o) {
        gb[o] += delta[o];
        for (std::size_t i = 0; i < in; ++i) gW[o * in + i] += delta[o] * acts[l - 1][i];
      }
      if (l == 1) break;
      prev_delta.assign(in, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        if (acts[l - 1][i] <= 0.0) continue;  // ReLU derivative
        double s = 0.0;
        for (std::size_t o = 0; o < out; ++o) s += W[o * in + i] * delta[o];
        prev_delta[i] = s;
      }
      delta.swap(prev_delta);
    }
  }
  const auto n = static_cast<double>(std::max<std::size_t>(X.rows(), 1));
  for (double& g : grad) g /= n;
  return loss / n;
}

MlpModel::MlpModel(std::vector<std::string> names, Standardizer standardizer,
                   std::vector<std::size_t> layer_sizes, std::vector<double> params)
    : ProbabilityModel(std::move(names)),
      standardizer_(std::move(standardizer)),
      layer_sizes_(std::move(layer_sizes)),
      params_(std::move(params)) {
  if (layer_sizes_.size() < 2 || layer_sizes_.front() != num_features() ||
      layer_sizes_.back() != 1 || params_.size() != MlpParamCount(layer_sizes_)) {
    throw Error(ErrorCode::kShapeMismatch, "MLP parameter sizes disagree");
  }
}

double MlpModel::Predict(std::span<const double> row) const {
  std::vector<double> scaled(row.size());
  standardizer_.Apply(row, scaled);
  return Sigmoid(MlpForward(layer_sizes_, params_, scaled));
}

nlohmann::json MlpModel::ParamsJson() const {
  return {{"standardizer", standardizer_.ToJson()},
          {"layer_sizes", layer_sizes_},
          {"params", params_},
          {"loss_history", loss_history_}};
}

std::unique_ptr<MlpModel> MlpModel::FromParams(std::vector<std::string> names,
                                               const nlohmann::json& p) {
  auto m = std::make_unique<MlpModel>(std::move(names),
                                      Standardizer::FromJson(p.at("standardizer")),
                                      p.at("layer_sizes").get<std::vector<std::size_t>>(),
                                      p.at("params").get<std::vector<double>>());
  if (p.contains("loss_history")) m->set_loss_history(p["loss_history"].get<std::vector<double>>());
  return m;
}

std::unique_ptr<MlpModel> TrainMlp(const Matrix& X, std::span<const int> y,
                                   std::vector<std::string> names, const MlpParams& params) {
  if (X.rows() == 0 || X.rows() != y.size()) {
    throw Error(ErrorCode::kShapeMismatch, "MLP: X and y disagree or are empty");
  }
  if (params.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be > 0");
  Standardizer standardizer = Standardizer::Fit(X);
  const Matrix Xs = standardizer.Apply(X);
  const auto sizes = LayerSizes(X.cols(), params.hidden);
  std::vector<double> theta(MlpParamCount(sizes), 0.0);
  Rng rng(params.seed);
  if (!params.zero_init) {
    // He-uniform weights, zero biases.
    std::size_t offset = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
      const double limit = std::sqrt(6.0 / static_cast<double>(sizes[l - 1]));
      for (std::size_t k = 0; k < sizes[l - 1] * sizes[l]; ++k) {
        theta[offset + k] = limit * (2.0 * Uniform01(rng) - 1.0);
      }
      offset += sizes[l - 1] * sizes[l] + sizes[l];
    }
  }

  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), grad(theta.size());
  std::vector<std::size_t> order(X.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> history;
  std::size_t step = 0;
  std::vector<int> batch_y;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[UniformIndex(rng, i)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      const std::size_t end = std::min(order.size(), start + params.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const Matrix batch = Xs.select_rows(idx);
      batch_y.clear();
      for (std::size_t r : idx) batch_y.push_back(y[r]);
      const double loss = MlpLossAndGradient(sizes, theta, batch, batch_y, grad);
      if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFinite, "MLP loss is not finite");
      epoch_loss += loss * static_cast<double>(idx.size());
      ++step;
      const double c1 = 1.0 - std::pow(params.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(params.beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < theta.size(); ++k) {
        m[k] = params.beta1 * m[k] + (1.0 - params.beta1) * grad[k];
        v[k] = params.beta2 * v[k] + (1.0 - params.beta2) * grad[k] * grad[k];
        theta[k] -= params.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + params.epsilon);
      }
    }
    history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  auto model = std::make_unique<MlpModel>(std::move(names), std::move(standardizer), sizes,
                                          std::move(theta));
  model->set_loss_history(std::move(history));
  return model;
}

}  // namespace credx
