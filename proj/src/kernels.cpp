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

#include "credx/kernels.hpp"

#include <chrono>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

#include "credx/random.hpp"

namespace credx::kernels {
namespace {

std::size_t Nearest(std::span<const double> row, const Matrix& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const auto cen = centroids.row(c);
    double d = 0.0;
    for (std::size_t f = 0; f < row.size(); ++f) d += (row[f] - cen[f]) * (row[f] - cen[f]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

ShapResult ExplainRow(const Predictor& model, const Matrix& X, const Background& bg,
                      const ShapConfig& config, std::size_t r, double& seconds) {
  ShapConfig row_config = config;
  row_config.seed = DeriveSeed(config.seed, r);
  const auto start = std::chrono::steady_clock::now();
  ShapResult res = KernelShap(model, X.row(r), bg, row_config);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

LimeConfig InstanceConfig(const LimeConfig& config, std::size_t id) {
  LimeConfig c = config;
  c.seed = DeriveSeed(config.seed, id);
  return c;
}

// Runs body(i) for i in [0, n) on `jobs` threads, rethrowing the first
// exception on the calling thread.
template <typename Body>
void ParallelFor(std::size_t n, int jobs, Body&& body) {
  std::exception_ptr error;
  std::mutex mu;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      const std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

void AssignNearestSerial(const Matrix& X, const Matrix& centroids,
                         std::span<std::size_t> assignment) {
  for (std::size_t i = 0; i < X.rows(); ++i) assignment[i] = Nearest(X.row(i), centroids);
}

void AssignNearestParallel(const Matrix& X, const Matrix& centroids,
                           std::span<std::size_t> assignment, int jobs) {
  const auto n = static_cast<std::int64_t>(X.rows());
#pragma omp parallel for schedule(static) num_threads(jobs)
  for (std::int64_t i = 0; i < n; ++i) {
    assignment[static_cast<std::size_t>(i)] = Nearest(X.row(static_cast<std::size_t>(i)), centroids);
  }
}

void PredictSerial(const Predictor& model, const Matrix& X, std::span<double> out) {
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = model.Predict(X.row(i));
}

void PredictParallel(const Predictor& model, const Matrix& X, std::span<double> out, int jobs) {
  ParallelFor(X.rows(), jobs, [&](std::size_t i) { out[i] = model.Predict(X.row(i)); });
}

ShapMatrix ShapMatrixSerial(const Predictor& model, const Matrix& X_explain, const Background& bg,
                            const ShapConfig& config, std::vector<std::string> names,
                            const ShapProgress& progress) {
  ShapMatrix sm;
  sm.feature_names = std::move(names);
  sm.results.resize(X_explain.rows());
  sm.seconds.resize(X_explain.rows());
  for (std::size_t r = 0; r < X_explain.rows(); ++r) {
    sm.results[r] = ExplainRow(model, X_explain, bg, config, r, sm.seconds[r]);
    if (progress) progress(r + 1, X_explain.rows());
  }
  return sm;
}

ShapMatrix ShapMatrixParallel(const Predictor& model, const Matrix& X_explain,
                              const Background& bg, const ShapConfig& config,
                              std::vector<std::string> names, int jobs,
                              const ShapProgress& progress) {
  ShapMatrix sm;
  sm.feature_names = std::move(names);
  sm.results.resize(X_explain.rows());
  sm.seconds.resize(X_explain.rows());
  std::mutex mu;
  std::size_t done = 0;
  ParallelFor(X_explain.rows(), jobs, [&](std::size_t r) {
    sm.results[r] = ExplainRow(model, X_explain, bg, config, r, sm.seconds[r]);
    if (progress) {
      const std::lock_guard lock(mu);
      progress(++done, X_explain.rows());
    }
  });
  return sm;
}

std::vector<LocalExplanation> ExplainBatchSerial(const Predictor& model, const Matrix& X,
                                                 std::span<const std::size_t> ids,
                                                 const Discretizer& disc,
                                                 const LimeConfig& config) {
  std::vector<LocalExplanation> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    out.push_back(ExplainInstance(model, X.row(id), disc, InstanceConfig(config, id), id));
  }
  return out;
}

std::vector<LocalExplanation> ExplainBatchParallel(const Predictor& model, const Matrix& X,
                                                   std::span<const std::size_t> ids,
                                                   const Discretizer& disc,
                                                   const LimeConfig& config, int jobs) {
  std::vector<LocalExplanation> out(ids.size());
  ParallelFor(ids.size(), jobs, [&](std::size_t i) {
    out[i] = ExplainInstance(model, X.row(ids[i]), disc, InstanceConfig(config, ids[i]), ids[i]);
  });
  return out;
}

std::vector<AleCurve> AleCurvesSerial(const Predictor& model, const Matrix& X,
                                      std::span<const std::size_t> features,
                                      std::size_t n_intervals,
                                      const std::vector<std::string>& names) {
  std::vector<AleCurve> out;
  out.reserve(features.size());
  for (std::size_t f : features) {
    out.push_back(ComputeAle(model, X, f, n_intervals, f < names.size() ? names[f] : ""));
  }
  return out;
}

std::vector<AleCurve> AleCurvesParallel(const Predictor& model, const Matrix& X,
                                        std::span<const std::size_t> features,
                                        std::size_t n_intervals,
                                        const std::vector<std::string>& names, int jobs) {
  std::vector<AleCurve> out(features.size());
  ParallelFor(features.size(), jobs, [&](std::size_t i) {
    const std::size_t f = features[i];
    out[i] = ComputeAle(model, X, f, n_intervals, f < names.size() ? names[f] : "");
  });
  return out;
}

}  // namespace credx::kernels
