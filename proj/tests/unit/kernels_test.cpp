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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "credx/error.hpp"

#include "credx/stats.hpp"
#include "test_util.hpp"

namespace credx {
namespace {

FunctionPredictor Model(std::size_t d) {
  return FunctionPredictor(d, [](std::span<const double> x) {
    double z = 0.5 * x[0] - x[1] + 0.25 * x[0] * x[2];
    for (std::size_t j = 3; j < x.size(); ++j) z += 0.1 * x[j];
    return Sigmoid(z);
  });
}

class ParallelMatchesSerial : public ::testing::TestWithParam<int> {};

TEST_P(ParallelMatchesSerial, AssignNearest) {
  const Matrix X = testing::RandomNormalMatrix(500, 4, 1);
  const Matrix C = testing::RandomNormalMatrix(7, 4, 2);
  std::vector<std::size_t> a(500), b(500);
  kernels::AssignNearestSerial(X, C, a);
  kernels::AssignNearestParallel(X, C, b, GetParam());
  EXPECT_EQ(a, b);
}

TEST_P(ParallelMatchesSerial, Predict) {
  const Matrix X = testing::RandomNormalMatrix(300, 5, 3);
  const auto model = Model(5);
  std::vector<double> a(300), b(300);
  kernels::PredictSerial(model, X, a);
  kernels::PredictParallel(model, X, b, GetParam());
  EXPECT_EQ(a, b);
}

TEST_P(ParallelMatchesSerial, ShapMatrix) {
  const auto model = Model(6);
  const Background bg = Background::Full(testing::RandomNormalMatrix(8, 6, 4));
  const Matrix X = testing::RandomNormalMatrix(9, 6, 5);
  ShapConfig cfg;
  cfg.n_coalitions = 40;
  cfg.seed = 6;
  const auto a = kernels::ShapMatrixSerial(model, X, bg, cfg, testing::FeatureNames(6));
  const auto b = kernels::ShapMatrixParallel(model, X, bg, cfg, testing::FeatureNames(6), GetParam());
  ASSERT_EQ(a.rows(), b.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    EXPECT_EQ(a.results[r].phi, b.results[r].phi);
    EXPECT_EQ(a.results[r].base_value, b.results[r].base_value);
  }
}

TEST_P(ParallelMatchesSerial, ExplainBatch) {
  const Matrix X = testing::RandomNormalMatrix(200, 4, 7);
  const auto model = Model(4);
  const Discretizer disc = Discretizer::Fit(X, testing::FeatureNames(4));
  LimeConfig cfg;
  cfg.n_samples = 300;
  cfg.top_k = 3;
  const std::vector<std::size_t> ids = {0, 5, 17, 42, 199};
  const auto a = kernels::ExplainBatchSerial(model, X, ids, disc, cfg);
  const auto b = kernels::ExplainBatchParallel(model, X, ids, disc, cfg, GetParam());
  ASSERT_EQ(a.size(), ids.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].ToJson(), b[i].ToJson());
  // Distinct instances draw distinct perturbations.
  EXPECT_NE(a[0].ToJson()["entries"], a[1].ToJson()["entries"]);
}

TEST_P(ParallelMatchesSerial, AleCurves) {
  const Matrix X = testing::RandomNormalMatrix(400, 4, 8);
  const auto model = Model(4);
  const std::vector<std::size_t> features = {0, 1, 3};
  const auto a = kernels::AleCurvesSerial(model, X, features, 10, testing::FeatureNames(4));
  const auto b = kernels::AleCurvesParallel(model, X, features, 10, testing::FeatureNames(4), GetParam());
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].ToJson(), b[i].ToJson());
  EXPECT_EQ(a[2].name, "f3");
}

INSTANTIATE_TEST_SUITE_P(Jobs, ParallelMatchesSerial, ::testing::Values(1, 2, 3, 4));

TEST(ParallelErrors, FirstExceptionPropagates) {
  const FunctionPredictor model(2, [](std::span<const double> x) -> double {
    if (x[0] > 1.0) throw Error(ErrorCode::kNonFinite, "boom");
    return 0.0;
  });
  const Matrix X = testing::RandomNormalMatrix(100, 2, 9);
  std::vector<double> out(100);
  EXPECT_THROW(kernels::PredictParallel(model, X, out, 3), Error);
}

}  // namespace
}  // namespace credx
