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
#include <fstream>

#include <fmt/format.h>

#include "credx/error.hpp"

namespace credx {
namespace {

constexpr int kModelFormatVersion = 1;

}  // namespace

void Predictor::PredictBatch(const Matrix& X, std::span<double> out) const {
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = Predict(X.row(r));
}

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kForest: return "forest";
    case ModelKind::kBoosted: return "boosted";
    case ModelKind::kSvmLinear: return "svm";
    case ModelKind::kMlp: return "mlp";
  }
  return "logistic";
}

ModelKind ParseModelKind(std::string_view name) {
  for (ModelKind k : {ModelKind::kLogistic, ModelKind::kForest, ModelKind::kBoosted,
                      ModelKind::kSvmLinear, ModelKind::kMlp}) {
    if (ModelKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown model kind '{}'", name));
}

Standardizer Standardizer::Fit(const Matrix& X) {
  Standardizer s;
  s.mean.assign(X.cols(), 0.0);
  s.scale.assign(X.cols(), 1.0);
  if (X.rows() == 0) return s;
  const auto n = static_cast<double>(X.rows());
  for (std::size_t c = 0; c < X.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) sum += X(r, c);
    const double m = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) ss += (X(r, c) - m) * (X(r, c) - m);
    const double sd = std::sqrt(ss / n);
    s.mean[c] = m;
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Standardizer::Apply(std::span<const double> row, std::span<double> out) const {
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean[c]) / scale[c];
}

Matrix Standardizer::Apply(const Matrix& X) const {
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) Apply(X.row(r), out.row(r));
  return out;
}

nlohmann::json Standardizer::ToJson() const { return {{"mean", mean}, {"scale", scale}}; }

Standardizer Standardizer::FromJson(const nlohmann::json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.mean.size() != s.scale.size()) throw Error(ErrorCode::kFormat, "bad standardizer");
  return s;
}

std::vector<double> ProbabilityModel::PredictProba(const Matrix& X) const {
  if (X.rows() > 0 && X.cols() != num_features()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("model expects {} features, got {}", num_features(), X.cols()));
  }
  std::vector<double> out(X.rows());
  PredictBatch(X, out);
  return out;
}

nlohmann::json ProbabilityModel::ToJson() const {
  return {{"format", "credx-model"},
          {"version", kModelFormatVersion},
          {"kind", ModelKindName(kind())},
          {"feature_names", feature_names_},
          {"params", ParamsJson()}};
}

std::unique_ptr<ProbabilityModel> ModelFromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "credx-model") {
      throw Error(ErrorCode::kFormat, "not a credx model document");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::kFormat, fmt::format("unsupported model version {}", version));
    }
    const ModelKind kind = ParseModelKind(j.at("kind").get<std::string>());
    auto names = j.at("feature_names").get<std::vector<std::string>>();
    const auto& p = j.at("params");
    switch (kind) {
      case ModelKind::kLogistic: return LogisticModel::FromParams(std::move(names), p);
      case ModelKind::kForest:
      case ModelKind::kBoosted: return TreeEnsembleModel::FromParams(kind, std::move(names), p);
      case ModelKind::kSvmLinear: return SvmModel::FromParams(std::move(names), p);
      case ModelKind::kMlp: return MlpModel::FromParams(std::move(names), p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, fmt::format("malformed model document: {}", e.what()));
  }
  throw Error(ErrorCode::kFormat, "unreachable model kind");
}

void SaveModel(const ProbabilityModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << model.ToJson().dump(1) << '\n';
}

std::unique_ptr<ProbabilityModel> LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, fmt::format("{}: {}", path.string(), e.what()));
  }
  return ModelFromJson(j);
}

}  // namespace credx
