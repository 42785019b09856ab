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

#include "credx/shap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "credx/error.hpp"

#include "credx/stats.hpp"
#include "test_util.hpp"

namespace credx {
namespace {

// Shapley values by averaging marginal contributions over every feature
// ordering, with the interventional value function computed directly.
std::vector<double> PermutationShapley(const Predictor& model, std::span<const double> x,
                                       const Background& bg) {
  const std::size_t d = x.size();
  auto value = [&](const std::vector<bool>& present) {
    double total = 0;
    std::vector<double> row(d);
    for (std::size_t b = 0; b < bg.size(); ++b) {
      for (std::size_t j = 0; j < d; ++j) row[j] = present[j] ? x[j] : bg.rows(b, j);
      total += bg.weights[b] * model.Predict(row);
    }
    return total;
  };
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(d, 0.0);
  double count = 0;
  do {
    std::vector<bool> present(d, false);
    double before = value(present);
    for (std::size_t j : order) {
      present[j] = true;
      const double after = value(present);
      phi[j] += after - before;
      before = after;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= count;
  return phi;
}

FunctionPredictor InteractingModel(std::size_t d) {
  return FunctionPredictor(d, [](std::span<const double> x) {
    double z = 0.4 * x[0] - 0.7 * x[1] + 0.3 * x[0] * x[2];
    for (std::size_t j = 3; j < x.size(); ++j) z += 0.1 * static_cast<double>(j) * x[j] * x[j - 1];
    return Sigmoid(z);
  });
}

Background WeightedBackground(std::size_t rows, std::size_t d, std::uint64_t seed) {
  Background bg = Background::Full(testing::RandomNormalMatrix(rows, d, seed));
  Rng rng(seed + 1);
  double total = 0;
  for (double& w : bg.weights) total += (w = 0.2 + Uniform01(rng));
  for (double& w : bg.weights) w /= total;
  return bg;
}

TEST(CoalitionWeight, KnownValues) {
  EXPECT_DOUBLE_EQ(CoalitionWeight(4, 2), 3.0 / (6.0 * 2 * 2));
  EXPECT_DOUBLE_EQ(CoalitionWeight(3, 1), 2.0 / (3.0 * 1 * 2));
  EXPECT_DOUBLE_EQ(CoalitionWeight(4, 1), 0.25);
  for (std::size_t s = 1; s < 10; ++s) EXPECT_DOUBLE_EQ(CoalitionWeight(10, s), CoalitionWeight(10, 10 - s));
  for (std::size_t s : {std::size_t{0}, std::size_t{5}}) {
    try {
      CoalitionWeight(5, s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDomainError);
    }
  }
}

TEST(CoalitionBudget, DefaultIsCappedByCoalitionCount) {
  EXPECT_EQ(DefaultCoalitionBudget(4), 16u);
  EXPECT_EQ(DefaultCoalitionBudget(16), 2u * 16 + 2048);
}

TEST(MaskedPrediction, FullEmptyAndAdditive) {
  const FunctionPredictor model(2, [](std::span<const double> x) { return 2 * x[0] + 3 * x[1]; });
  Matrix rows(2, 2);
  rows(0, 0) = 1;
  rows(0, 1) = 1;
  rows(1, 0) = 3;
  rows(1, 1) = -1;
  const Background bg = Background::Full(rows);
  const std::vector<double> x = {10, 20};
  const std::vector<std::uint8_t> full = {1, 1}, none = {0, 0}, first = {1, 0};
  EXPECT_DOUBLE_EQ(MaskedPrediction(model, x, full, bg), 80.0);
  EXPECT_DOUBLE_EQ(MaskedPrediction(model, x, none, bg), 4.0);
  EXPECT_DOUBLE_EQ(MaskedPrediction(model, x, first, bg), 20.0);
}

TEST(ExactShapley, LinearModelWithZeroBackground) {
  const FunctionPredictor model(2, [](std::span<const double> x) { return x[0] + 2 * x[1]; });
  const Background bg = Background::Full(Matrix(1, 2, 0.0));
  const std::vector<double> x = {1, 1};
  const auto r = ExactShapley(model, x, bg);
  EXPECT_NEAR(r.phi[0], 1.0, 1e-12);
  EXPECT_NEAR(r.phi[1], 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.base_value, 0.0);
  EXPECT_DOUBLE_EQ(r.fx, 3.0);
}

TEST(ExactShapley, PureInteractionSplitsEvenly) {
  const FunctionPredictor model(2, [](std::span<const double> x) { return x[0] * x[1]; });
  const Background bg = Background::Full(Matrix(1, 2, 0.0));
  const std::vector<double> x = {1, 1};
  const auto r = ExactShapley(model, x, bg);
  EXPECT_NEAR(r.phi[0], 0.5, 1e-12);
  EXPECT_NEAR(r.phi[1], 0.5, 1e-12);
}

TEST(ExactShapley, DummyFeatureGetsZero) {
  const FunctionPredictor model(3, [](std::span<const double> x) { return std::sin(x[0]) * x[2]; });
  const Background bg = WeightedBackground(7, 3, 4);
  const std::vector<double> x = {0.3, 5.0, -1.2};
  EXPECT_NEAR(ExactShapley(model, x, bg).phi[1], 0.0, 1e-14);
}

TEST(ExactShapley, MatchesPermutationOracle) {
  const auto model = InteractingModel(6);
  const Background bg = WeightedBackground(9, 6, 5);
  const Matrix X = testing::RandomNormalMatrix(3, 6, 6);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto r = ExactShapley(model, X.row(i), bg);
    const auto oracle = PermutationShapley(model, X.row(i), bg);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(r.phi[j], oracle[j], 1e-12);
    EXPECT_LT(r.LocalAccuracyGap(), 1e-12);
  }
}

TEST(ExactShapley, RefusesTooManyFeatures) {
  const FunctionPredictor model(16, [](std::span<const double>) { return 0.0; });
  const Background bg = Background::Full(Matrix(1, 16, 0.0));
  const std::vector<double> x(16, 1.0);
  try {
    ExactShapley(model, x, bg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyFeatures);
  }
}

TEST(KernelShap, ExhaustiveEqualsExact) {
  const auto model = InteractingModel(7);
  const Background bg = WeightedBackground(11, 7, 7);
  const Matrix X = testing::RandomNormalMatrix(4, 7, 8);
  ShapConfig cfg;
  cfg.exhaustive = true;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto kernel = KernelShap(model, X.row(i), bg, cfg);
    const auto exact = ExactShapley(model, X.row(i), bg);
    for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(kernel.phi[j], exact.phi[j], 1e-9);
    EXPECT_NEAR(kernel.base_value, exact.base_value, 1e-15);
  }
}

TEST(KernelShap, SampledModeKeepsLocalAccuracyAndIsDeterministic) {
  const auto model = InteractingModel(16);
  const Background bg = WeightedBackground(20, 16, 9);
  const Matrix X = testing::RandomNormalMatrix(3, 16, 10);
  ShapConfig cfg;
  cfg.n_coalitions = 300;
  cfg.seed = 12;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto a = KernelShap(model, X.row(i), bg, cfg);
    const auto b = KernelShap(model, X.row(i), bg, cfg);
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_LT(a.LocalAccuracyGap(), 1e-10);
    EXPECT_DOUBLE_EQ(a.fx, model.Predict(X.row(i)));
  }
}

TEST(KernelShap, SampledModeApproachesExactWithBudget) {
  const auto model = InteractingModel(10);
  const Background bg = WeightedBackground(10, 10, 13);
  const Matrix X = testing::RandomNormalMatrix(1, 10, 14);
  const auto exact = ExactShapley(model, X.row(0), bg);
  ShapConfig cfg;
  cfg.n_coalitions = 800;
  const auto approx = KernelShap(model, X.row(0), bg, cfg);
  double err = 0, scale = 0;
  for (std::size_t j = 0; j < 10; ++j) {
    err = std::max(err, std::abs(approx.phi[j] - exact.phi[j]));
    scale = std::max(scale, std::abs(exact.phi[j]));
  }
  EXPECT_LT(err, 0.05 * scale);
}

TEST(KernelShap, DuplicatedFeaturesShareCreditEqually) {
  const FunctionPredictor model(3, [](std::span<const double> x) { return Sigmoid(x[0] + x[1] - 0.5 * x[2]); });
  Matrix rows = testing::RandomNormalMatrix(15, 3, 15);
  for (std::size_t i = 0; i < rows.rows(); ++i) rows(i, 1) = rows(i, 0);
  const Background bg = Background::Full(rows);
  const std::vector<double> x = {1.2, 1.2, 0.4};
  const auto r = KernelShap(model, x, bg, ShapConfig{});
  EXPECT_NEAR(r.phi[0], r.phi[1], 1e-12);
}

TEST(KernelShap, ExhaustiveRefusedAboveLimit) {
  const FunctionPredictor model(14, [](std::span<const double>) { return 0.0; });
  const Background bg = Background::Full(Matrix(1, 14, 0.0));
  const std::vector<double> x(14, 0.0);
  ShapConfig cfg;
  cfg.exhaustive = true;
  try {
    KernelShap(model, x, bg, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyFeatures);
  }
}

TEST(ShapMatrix, EmptyInputGivesEmptyMatrix) {
  const auto model = InteractingModel(4);
  const Background bg = WeightedBackground(5, 4, 16);
  const auto sm = ComputeShapMatrix(model, Matrix(0, 4), bg, ShapConfig{}, testing::FeatureNames(4));
  EXPECT_EQ(sm.rows(), 0u);
  EXPECT_EQ(sm.cols(), 4u);
  EXPECT_EQ(sm.MaxLocalAccuracyGap(), 0.0);
}

TEST(ShapMatrix, JsonRoundTripAndCsvShape) {
  const auto model = InteractingModel(4);
  const Background bg = WeightedBackground(5, 4, 17);
  const Matrix X = testing::RandomNormalMatrix(6, 4, 18);
  std::size_t calls = 0;
  const auto sm = ComputeShapMatrix(model, X, bg, ShapConfig{}, testing::FeatureNames(4), 1,
                                    [&](std::size_t, std::size_t) { ++calls; });
  EXPECT_GT(calls, 0u);
  const auto back = ShapMatrix::FromJson(sm.ToJson());
  ASSERT_EQ(back.rows(), 6u);
  for (std::size_t r = 0; r < 6; ++r) EXPECT_EQ(back.results[r].phi, sm.results[r].phi);
  std::ostringstream csv;
  sm.WriteCsv(csv);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_EQ(text.substr(0, text.find('\n')), "f0,f1,f2,f3,base_value,fx");
  const auto mean_abs = sm.MeanAbsPhi();
  double manual = 0;
  for (std::size_t r = 0; r < 6; ++r) manual += std::abs(sm.phi(r, 1));
  EXPECT_NEAR(mean_abs[1], manual / 6, 1e-15);
}

TEST(TopFeatures, TiesGoToLowerIndex) {
  const std::vector<double> s = {0.5, 0.9, 0.5, 0.1, 0.9};
  EXPECT_EQ(TopFeatures(s, 3), (std::vector<std::size_t>{1, 4, 0}));
  EXPECT_EQ(TopFeatures(s, 10).size(), 5u);
}

TEST(JaccardIndex, SetOverlap) {
  const std::vector<std::size_t> a = {1, 2, 3, 4}, b = {3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(Jaccard(a, b), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(Jaccard(a, a), 1.0);
}

}  // namespace
}  // namespace credx
