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

std::string_view MethodName(SvmProbabilityMethod m) {
  return m == SvmProbabilityMethod::kPlatt ? "platt" : "raw_sigmoid";
}

SvmProbabilityMethod ParseMethod(std::string_view s) {
  if (s == "platt") return SvmProbabilityMethod::kPlatt;
  if (s == "raw_sigmoid") return SvmProbabilityMethod::kRawSigmoid;
  throw Error(ErrorCode::kFormat, "unknown SVM probability method");
}

// Pegasos on hinge loss + (lambda / 2) |w|^2 with the bias carried as an
// extra constant feature. Returns the tail-averaged iterate (w..., b).
std::vector<double> Pegasos(const Matrix& Xs, std::span<const int> y,
                            std::span<const std::size_t> rows, double lambda,
                            std::size_t epochs, Rng& rng) {
  const std::size_t d = Xs.cols();
  std::vector<double> w(d + 1, 0.0), avg(d + 1, 0.0);
  std::vector<std::size_t> order(rows.begin(), rows.end());
  const std::size_t total = epochs * order.size();
  const std::size_t tail_start = total / 2;
  std::size_t t = 0, averaged = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[UniformIndex(rng, i)]);
    }
    for (std::size_t r : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double label = y[r] != 0 ? 1.0 : -1.0;
      const auto row = Xs.row(r);
      double margin = w[d];
      for (std::size_t c = 0; c < d; ++c) margin += w[c] * row[c];
      margin *= label;
      const double shrink = 1.0 - eta * lambda;
      for (double& v : w) v *= shrink;
      if (margin < 1.0) {
        for (std::size_t c = 0; c < d; ++c) w[c] += eta * label * row[c];
        w[d] += eta * label;
      }
      if (t > tail_start) {
        ++averaged;
        const double k = 1.0 / static_cast<double>(averaged);
        for (std::size_t c = 0; c <= d; ++c) avg[c] += k * (w[c] - avg[c]);
      }
    }
  }
  return averaged > 0 ? avg : w;
}

}  // namespace

SvmModel::SvmModel(std::vector<std::string> names, Standardizer standardizer,
                   std::vector<double> w, double b, double platt_a, double platt_b,
                   SvmProbabilityMethod method)
    : ProbabilityModel(std::move(names)),
      standardizer_(std::move(standardizer)),
      w_(std::move(w)),
      b_(b),
      platt_a_(platt_a),
      platt_b_(platt_b),
      method_(method) {
  if (w_.size() != num_features() || standardizer_.mean.size() != num_features()) {
    throw Error(ErrorCode::kShapeMismatch, "SVM parameter sizes disagree");
  }
}

double SvmModel::Decision(std::span<const double> row) const {
  double d = b_;
  for (std::size_t c = 0; c < w_.size(); ++c) {
    d += w_[c] * (row[c] - standardizer_.mean[c]) / standardizer_.scale[c];
  }
  return d;
}

double SvmModel::Probability(double decision, SvmProbabilityMethod method) const {
  return method == SvmProbabilityMethod::kPlatt ? Sigmoid(platt_a_ * decision + platt_b_)
                                                : Sigmoid(decision);
}

double SvmModel::Predict(std::span<const double> row) const {
  return Probability(Decision(row), method_);
}

nlohmann::json SvmModel::ParamsJson() const {
  return {{"standardizer", standardizer_.ToJson()},
          {"weights", w_},
          {"bias", b_},
          {"platt_a", platt_a_},
          {"platt_b", platt_b_},
          {"method", MethodName(method_)}};
}

std::unique_ptr<SvmModel> SvmModel::FromParams(std::vector<std::string> names,
                                               const nlohmann::json& p) {
  return std::make_unique<SvmModel>(
      std::move(names), Standardizer::FromJson(p.at("standardizer")),
      p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>(),
      p.at("platt_a").get<double>(), p.at("platt_b").get<double>(),
      ParseMethod(p.at("method").get<std::string>()));
}

PlattFit FitPlatt(std::span<const double> decisions, std::span<const int> y) {
  const auto n_pos = static_cast<double>(std::count_if(y.begin(), y.end(), [](int v) { return v != 0; }));
  const double n_neg = static_cast<double>(y.size()) - n_pos;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  std::vector<double> target(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) target[i] = y[i] != 0 ? hi : lo;

  const auto objective = [&](double a, double b) {
    double loss = 0.0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      const double z = a * decisions[i] + b;
      loss += Softplus(z) - target[i] * z;
    }
    return loss;
  };
  PlattFit fit{0.0, Logit(std::clamp((n_pos + 1.0) / (n_neg + n_pos + 2.0), 1e-9, 1 - 1e-9))};
  double loss = objective(fit.a, fit.b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0, gb = 0, haa = 1e-12, hab = 0, hbb = 1e-12;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      const double p = Sigmoid(fit.a * decisions[i] + fit.b);
      const double r = p - target[i];
      const double w = p * (1.0 - p);
      ga += r * decisions[i];
      gb += r;
      haa += w * decisions[i] * decisions[i];
      hab += w * decisions[i];
      hbb += w;
    }
    if (std::hypot(ga, gb) < 1e-10) break;
    const double det = haa * hbb - hab * hab;
    double da = (hbb * ga - hab * gb) / det;
    double db = (haa * gb - hab * ga) / det;
    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k) {
      const double next = objective(fit.a - step * da, fit.b - step * db);
      if (next < loss) {
        fit = {fit.a - step * da, fit.b - step * db};
        loss = next;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return fit;
}

std::unique_ptr<SvmModel> TrainSvmLinear(const Matrix& X, std::span<const int> y,
                                         std::vector<std::string> names,
                                         const SvmParams& params) {
  if (X.rows() < 2 || X.rows() != y.size()) {
    throw Error(ErrorCode::kShapeMismatch, "SVM: X and y disagree or are too small");
  }
  if (params.c <= 0) throw Error(ErrorCode::kInvalidArgument, "SVM needs C > 0");
  Standardizer standardizer = Standardizer::Fit(X);
  const Matrix Xs = standardizer.Apply(X);
  Rng rng(params.seed);

  std::vector<std::size_t> all(X.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> fit_rows = all, calibration_rows;
  if (params.method == SvmProbabilityMethod::kPlatt) {
    for (std::size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[UniformIndex(rng, i)]);
    const auto n_cal = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(params.calibration_fraction * static_cast<double>(all.size()))),
        1, all.size() - 1);
    calibration_rows.assign(all.begin(), all.begin() + static_cast<long>(n_cal));
    fit_rows.assign(all.begin() + static_cast<long>(n_cal), all.end());
    std::sort(fit_rows.begin(), fit_rows.end());
  }
  const double lambda = 1.0 / (params.c * static_cast<double>(fit_rows.size()));
  std::vector<double> theta = Pegasos(Xs, y, fit_rows, lambda, params.epochs, rng);
  const double b = theta.back();
  theta.pop_back();

  PlattFit platt;
  if (!calibration_rows.empty()) {
    std::vector<double> decisions;
    std::vector<int> labels;
    for (std::size_t r : calibration_rows) {
      double d = b;
      for (std::size_t c = 0; c < theta.size(); ++c) d += theta[c] * Xs(r, c);
      decisions.push_back(d);
      labels.push_back(y[r]);
    }
    platt = FitPlatt(decisions, labels);
  }
  return std::make_unique<SvmModel>(std::move(names), std::move(standardizer), std::move(theta),
                                    b, platt.a, platt.b, params.method);
}

std::vector<double> SvmProbabilityMap(const ProbabilityModel& model, const Matrix& X,
                                      SvmProbabilityMethod method) {
  const auto* svm = dynamic_cast<const SvmModel*>(&model);
  if (svm == nullptr) throw Error(ErrorCode::kNotAnSvm, "probability map applies to SVM models");
  if (X.rows() > 0 && X.cols() != model.num_features()) {
    throw Error(ErrorCode::kShapeMismatch, "SVM feature count mismatch");
  }
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = svm->Probability(svm->Decision(X.row(r)), method);
  return out;
}

}  // namespace credx
