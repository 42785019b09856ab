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

#include "credx/lime.hpp"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "credx/error.hpp"

#include "credx/stats.hpp"
#include "test_util.hpp"

namespace credx {
namespace {

Matrix Sequence(std::size_t n) {
  Matrix X(n, 1);
  for (std::size_t i = 0; i < n; ++i) X(i, 0) = static_cast<double>(i + 1);
  return X;
}

TEST(Discretizer, QuartileEdgesAndLowerBinOnEdge) {
  const Discretizer disc = Discretizer::Fit(Sequence(100), {"x"});
  const FeatureBins& fb = disc.feature(0);
  ASSERT_FALSE(fb.categorical_like);
  ASSERT_EQ(fb.edges.size(), 3u);
  EXPECT_DOUBLE_EQ(fb.edges[0], 25.75);
  EXPECT_DOUBLE_EQ(fb.edges[1], 50.5);
  EXPECT_DOUBLE_EQ(fb.edges[2], 75.25);
  EXPECT_EQ(disc.Bin(0, 25.75), 0u);
  EXPECT_EQ(disc.Bin(0, 25.76), 1u);
  EXPECT_EQ(disc.Bin(0, 1000.0), 3u);
  EXPECT_EQ(disc.num_bins(0), 4u);
  for (const auto& b : fb.bins) EXPECT_EQ(b.count, 25u);
  EXPECT_EQ(disc.Condition(0, 0), "x <= 25.75");
  EXPECT_EQ(disc.Condition(0, 1), "25.75 < x <= 50.50");
  EXPECT_EQ(disc.Condition(0, 3), "x > 75.25");
}

TEST(Discretizer, FewDistinctValuesAreCategorical) {
  Matrix X(10, 1);
  for (std::size_t i = 0; i < 10; ++i) X(i, 0) = i < 7 ? 0.0 : 1.0;
  const Discretizer disc = Discretizer::Fit(X, {"home_RENT"});
  const FeatureBins& fb = disc.feature(0);
  EXPECT_TRUE(fb.categorical_like);
  EXPECT_EQ(fb.levels, (std::vector<double>{0.0, 1.0}));
  EXPECT_NEAR(fb.frequencies[0], 0.7, 1e-15);
  EXPECT_EQ(disc.Bin(0, 1.0), 1u);
  EXPECT_EQ(disc.Condition(0, 1), "home_RENT = 1");
}

TEST(Perturbation, FirstRowIsTheInstance) {
  const Matrix X = testing::RandomNormalMatrix(200, 3, 1);
  const Discretizer disc = Discretizer::Fit(X, testing::FeatureNames(3));
  LimeConfig cfg;
  cfg.n_samples = 500;
  const std::vector<double> x = {0.1, -0.2, 0.3};
  const auto s = SamplePerturbations(x, disc, cfg);
  ASSERT_EQ(s.raw.rows(), 500u);
  for (std::size_t f = 0; f < 3; ++f) {
    EXPECT_EQ(s.raw(0, f), x[f]);
    EXPECT_EQ(s.interpretable(0, f), 1.0);
  }
  // Interpretable indicators agree with the bins of the raw draws.
  for (std::size_t i = 1; i < 500; ++i) {
    for (std::size_t f = 0; f < 3; ++f) {
      const double same = disc.Bin(f, s.raw(i, f)) == disc.Bin(f, x[f]) ? 1.0 : 0.0;
      ASSERT_EQ(s.interpretable(i, f), same);
    }
  }
}

TEST(Perturbation, SameSeedSameSample) {
  const Matrix X = testing::RandomNormalMatrix(200, 3, 2);
  const Discretizer disc = Discretizer::Fit(X, testing::FeatureNames(3));
  LimeConfig cfg;
  cfg.n_samples = 100;
  cfg.seed = 7;
  const std::vector<double> x = {0.0, 0.0, 0.0};
  EXPECT_EQ(testing::Values(SamplePerturbations(x, disc, cfg).raw), testing::Values(SamplePerturbations(x, disc, cfg).raw));
}

TEST(Proximity, GaussianKernelOfDistance) {
  Matrix Z(3, 4, 1.0);
  Z(1, 0) = 0.0;
  Z(2, 0) = 0.0;
  Z(2, 1) = 0.0;
  LimeConfig cfg;
  const auto w = ProximityWeights(Z, cfg);
  const double width = 0.75 * 2.0;
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  EXPECT_NEAR(w[1], std::exp(-1.0 / (width * width)), 1e-15);
  EXPECT_NEAR(w[2], std::exp(-2.0 / (width * width)), 1e-15);
  cfg.kernel_width = 0.0;
  EXPECT_THROW(ProximityWeights(Z, cfg), Error);
}

struct LinearProblem {
  Matrix Z;
  std::vector<double> y, w;
};

LinearProblem MakeLinear(std::size_t n, const std::vector<double>& beta, double intercept) {
  LinearProblem p{testing::RandomNormalMatrix(n, beta.size(), 5), {}, {}};
  Rng rng(6);
  for (std::size_t i = 0; i < n; ++i) {
    double v = intercept;
    for (std::size_t j = 0; j < beta.size(); ++j) v += beta[j] * p.Z(i, j);
    p.y.push_back(v);
    p.w.push_back(0.1 + Uniform01(rng));
  }
  return p;
}

TEST(Ridge, UnpenalisedRecoversExactLinearTarget) {
  const std::vector<double> beta = {0.8, -0.3, 0.0, 1.7};
  const auto p = MakeLinear(300, beta, 0.25);
  const std::vector<std::size_t> cols = {0, 1, 2, 3};
  const auto sol = WeightedRidge(p.Z, cols, p.y, p.w, 0.0);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(sol.coefficients[j], beta[j], 1e-6);
  EXPECT_NEAR(sol.intercept, 0.25, 1e-6);
  EXPECT_EQ(sol.penalty, 0.0);
}

TEST(Ridge, UnitPenaltyShrinksOnlySlightlyWithManySamples) {
  const std::vector<double> beta = {0.8, -0.3, 0.0, 1.7};
  const auto p = MakeLinear(2000, beta, 0.25);
  const std::vector<std::size_t> cols = {0, 1, 2, 3};
  const auto sol = WeightedRidge(p.Z, cols, p.y, p.w, 1.0);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(sol.coefficients[j], beta[j], 2e-3);
}

TEST(Ridge, DuplicatedColumnEscalatesAndSplitsWeight) {
  auto p = MakeLinear(200, {1.0, 0.5}, 0.0);
  Matrix Z(200, 3);
  for (std::size_t i = 0; i < 200; ++i) {
    Z(i, 0) = p.Z(i, 0);
    Z(i, 1) = p.Z(i, 0);
    Z(i, 2) = p.Z(i, 1);
  }
  const std::vector<std::size_t> cols = {0, 1, 2};
  const auto sol = WeightedRidge(Z, cols, p.y, p.w, 0.0);
  EXPECT_EQ(sol.penalty, 1e-6);
  EXPECT_NEAR(sol.coefficients[0], 0.5, 1e-6);
  EXPECT_NEAR(sol.coefficients[1], 0.5, 1e-6);
  EXPECT_NEAR(sol.coefficients[2], 0.5, 1e-6);
}

TEST(Ridge, ZeroWeightsAreSingular) {
  const auto p = MakeLinear(10, {1.0}, 0.0);
  const std::vector<double> zeros(10, 0.0);
  const std::vector<std::size_t> cols = {0};
  try {
    WeightedRidge(p.Z, cols, p.y, zeros, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
}

TEST(Surrogate, SelectsLargestCoefficientsInOrder) {
  const auto p = MakeLinear(500, {0.0, -2.0, 0.0, 0.9, 0.4}, 0.0);
  LimeConfig cfg;
  cfg.top_k = 3;
  cfg.ridge_penalty = 0.0;
  const auto fit = FitSurrogate(p.Z, p.y, p.w, cfg);
  EXPECT_EQ(fit.selected, (std::vector<std::size_t>{1, 3, 4}));
  EXPECT_NEAR(fit.coefficients[0], -2.0, 1e-6);
  EXPECT_NEAR(fit.full_coefficients[0], 0.0, 1e-6);
  EXPECT_NEAR(fit.coefficients[2], 0.4, 1e-6);
  cfg.top_k = 6;
  EXPECT_THROW(FitSurrogate(p.Z, p.y, p.w, cfg), Error);
}

TEST(Surrogate, PerfectFitHasUnitR2) {
  const auto p = MakeLinear(100, {1.0, 2.0}, 0.5);
  LimeConfig cfg;
  cfg.top_k = 2;
  cfg.ridge_penalty = 0.0;
  EXPECT_NEAR(FitSurrogate(p.Z, p.y, p.w, cfg).r2, 1.0, 1e-12);
}

TEST(Explain, LinearScoreModelSignsMatchWeightsWithoutDiscretizer) {
  const std::size_t d = 10;
  const Matrix X = testing::RandomNormalMatrix(1000, d, 8);
  std::vector<double> beta(d);
  for (std::size_t j = 0; j < d; ++j) beta[j] = (j % 2 == 0 ? 1.0 : -1.0) * (0.2 + 0.1 * j);
  const FunctionPredictor model(d, [&](std::span<const double> x) {
    double z = 0;
    for (std::size_t j = 0; j < d; ++j) z += beta[j] * x[j];
    return z;
  });
  const Discretizer disc = Discretizer::Fit(X, testing::FeatureNames(d));
  LimeConfig cfg;
  cfg.discretizer = DiscretizerKind::kNone;
  cfg.top_k = d;
  cfg.seed = 11;
  const auto ex = ExplainInstance(model, X.row(0), disc, cfg, 0);
  ASSERT_EQ(ex.entries.size(), d);
  for (const auto& e : ex.entries) {
    EXPECT_EQ(e.weight > 0, beta[e.feature] > 0) << e.feature_name;
    // Standardized surrogate coefficients approach beta * sd.
    EXPECT_NEAR(e.weight, beta[e.feature] * disc.feature(e.feature).sd, 0.02);
  }
}

TEST(Explain, EntriesSortedAndTableRendered) {
  const Matrix X = testing::RandomNormalMatrix(500, 4, 9);
  const FunctionPredictor model(4, [](std::span<const double> x) { return Sigmoid(3 * x[0] - x[2]); });
  const Discretizer disc = Discretizer::Fit(X, {"total_pymnt", "b", "int_rate", "d"});
  LimeConfig cfg;
  cfg.top_k = 3;
  cfg.seed = 1;
  const auto ex = ExplainInstance(model, X.row(3), disc, cfg, 3);
  ASSERT_EQ(ex.entries.size(), 3u);
  for (std::size_t i = 1; i < ex.entries.size(); ++i) {
    EXPECT_GE(std::abs(ex.entries[i - 1].weight), std::abs(ex.entries[i].weight));
  }
  EXPECT_EQ(ex.entries[0].feature, 0u);
  double sum = 0;
  for (const auto& e : ex.entries) sum += e.weight;
  EXPECT_NEAR(ex.top_k_sum, sum, 1e-12);
  const std::string table = ex.RenderTable();
  EXPECT_NE(table.find("total_pymnt"), std::string::npos);
  EXPECT_NE(table.find("Default"), std::string::npos);
  const auto again = ExplainInstance(model, X.row(3), disc, cfg, 3);
  EXPECT_EQ(again.ToJson(), ex.ToJson());
}

TEST(Explain, WidthMismatchIsShapeMismatch) {
  const Matrix X = testing::RandomNormalMatrix(50, 2, 10);
  const FunctionPredictor model(3, [](std::span<const double>) { return 0.5; });
  const Discretizer disc = Discretizer::Fit(X, testing::FeatureNames(2));
  const std::vector<double> x = {0, 0};
  EXPECT_THROW(ExplainInstance(model, x, disc, LimeConfig{}), Error);
}

}  // namespace
}  // namespace credx
