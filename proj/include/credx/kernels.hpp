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

// Data-parallel kernels. Each parallel entry point has a serial reference
// with the same contract; tests require bit-identical results between the
// two for any thread count, which holds because every unit of work (row,
// instance, feature) derives its own RNG stream from the master seed.

#include <span>
#include <vector>

#include "credx/ale.hpp"
#include "credx/background.hpp"
#include "credx/lime.hpp"
#include "credx/matrix.hpp"
#include "credx/model.hpp"
#include "credx/shap.hpp"

namespace credx {

namespace kernels {

// Index of the nearest centroid (squared Euclidean, ties to the lower index).
void AssignNearestSerial(const Matrix& X, const Matrix& centroids,
                         std::span<std::size_t> assignment);
void AssignNearestParallel(const Matrix& X, const Matrix& centroids,
                           std::span<std::size_t> assignment, int jobs);

void PredictSerial(const Predictor& model, const Matrix& X, std::span<double> out);
void PredictParallel(const Predictor& model, const Matrix& X, std::span<double> out, int jobs);

ShapMatrix ShapMatrixSerial(const Predictor& model, const Matrix& X_explain,
                            const Background& bg, const ShapConfig& config,
                            std::vector<std::string> names,
                            const ShapProgress& progress = {});
ShapMatrix ShapMatrixParallel(const Predictor& model, const Matrix& X_explain,
                              const Background& bg, const ShapConfig& config,
                              std::vector<std::string> names, int jobs,
                              const ShapProgress& progress = {});

std::vector<LocalExplanation> ExplainBatchSerial(const Predictor& model, const Matrix& X,
                                                 std::span<const std::size_t> ids,
                                                 const Discretizer& disc,
                                                 const LimeConfig& config);
std::vector<LocalExplanation> ExplainBatchParallel(const Predictor& model, const Matrix& X,
                                                   std::span<const std::size_t> ids,
                                                   const Discretizer& disc,
                                                   const LimeConfig& config, int jobs);

std::vector<AleCurve> AleCurvesSerial(const Predictor& model, const Matrix& X,
                                      std::span<const std::size_t> features,
                                      std::size_t n_intervals,
                                      const std::vector<std::string>& names);
std::vector<AleCurve> AleCurvesParallel(const Predictor& model, const Matrix& X,
                                        std::span<const std::size_t> features,
                                        std::size_t n_intervals,
                                        const std::vector<std::string>& names, int jobs);

}  // namespace kernels
}  // namespace credx
