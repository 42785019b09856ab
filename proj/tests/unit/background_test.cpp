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

#include "credx/background.hpp"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "credx/error.hpp"

#include "test_util.hpp"

namespace credx {
namespace {

TEST(KMeans, SingleClusterIsTheMean) {
  const Matrix X = testing::RandomNormalMatrix(100, 3, 1);
  Rng rng(2);
  const auto km = KMeans(X, 1, rng);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < 100; ++i) mean += X(i, j);
    EXPECT_NEAR(km.centroids(0, j), mean / 100, 1e-12);
  }
  EXPECT_EQ(km.sizes[0], 100u);
}

TEST(KMeans, SeparatesTwoBlobs) {
  Matrix X = testing::RandomNormalMatrix(200, 2, 3);
  for (std::size_t i = 0; i < 100; ++i) X(i, 0) += 20.0;
  Rng rng(4);
  const auto km = KMeans(X, 2, rng);
  EXPECT_EQ(km.sizes[0], 100u);
  EXPECT_EQ(km.sizes[1], 100u);
  for (std::size_t i = 1; i < 100; ++i) EXPECT_EQ(km.assignment[i], km.assignment[0]);
  for (std::size_t i = 100; i < 200; ++i) EXPECT_NE(km.assignment[i], km.assignment[0]);
}

TEST(KMeans, AssignmentIsNearestCentroid) {
  const Matrix X = testing::RandomNormalMatrix(300, 4, 5);
  Rng rng(6);
  const auto km = KMeans(X, 5, rng);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double best = INFINITY;
    std::size_t arg = 0;
    for (std::size_t c = 0; c < 5; ++c) {
      double d2 = 0;
      for (std::size_t j = 0; j < 4; ++j) d2 += (X(i, j) - km.centroids(c, j)) * (X(i, j) - km.centroids(c, j));
      if (d2 < best) {
        best = d2;
        arg = c;
      }
    }
    EXPECT_EQ(km.assignment[i], arg);
  }
  EXPECT_EQ(std::accumulate(km.sizes.begin(), km.sizes.end(), std::size_t{0}), 300u);
}

TEST(Summarize, WeightsAreClusterShares) {
  Matrix X = testing::RandomNormalMatrix(500, 3, 7);
  for (std::size_t i = 0; i < 500; ++i) X(i, 2) = 1000.0 * X(i, 2) + 5e4;
  const Background bg = SummarizeBackground(X, 10, 400, 8);
  EXPECT_EQ(bg.size(), 10u);
  EXPECT_EQ(bg.k, 10u);
  EXPECT_EQ(bg.source_n, 400u);
  EXPECT_EQ(bg.provenance, BackgroundSource::kKMeans);
  EXPECT_NEAR(std::accumulate(bg.weights.begin(), bg.weights.end(), 0.0), 1.0, 1e-12);
  for (double w : bg.weights) {
    EXPECT_GT(w, 0.0);
    EXPECT_NEAR(w * 400, std::round(w * 400), 1e-9);
  }
  // Raw units are kept: the large-scale column stays near its mean.
  double mean2 = 0;
  for (std::size_t c = 0; c < 10; ++c) mean2 += bg.weights[c] * bg.rows(c, 2);
  EXPECT_NEAR(mean2, 5e4, 200.0);
}

TEST(Summarize, SameSeedSameCentroids) {
  const Matrix X = testing::RandomNormalMatrix(400, 3, 9);
  EXPECT_EQ(testing::Values(SummarizeBackground(X, 6, 300, 1).rows), testing::Values(SummarizeBackground(X, 6, 300, 1).rows));
  EXPECT_EQ(testing::Values(SummarizeBackground(X, 6, 300, 1, 1).rows),
            testing::Values(SummarizeBackground(X, 6, 300, 1, 3).rows));
}

TEST(BackgroundSample, UniformWeightsWithoutReplacement) {
  const Matrix X = testing::RandomNormalMatrix(50, 2, 10);
  const Background bg = Background::Sample(X, 20, 3);
  EXPECT_EQ(bg.size(), 20u);
  EXPECT_EQ(bg.provenance, BackgroundSource::kSample);
  for (double w : bg.weights) EXPECT_DOUBLE_EQ(w, 1.0 / 20);
  EXPECT_EQ(Background::Sample(X, 80, 3).size(), 50u);
  const Background full = Background::Full(X);
  EXPECT_EQ(full.size(), 50u);
  EXPECT_EQ(full.provenance, BackgroundSource::kFull);
}

}  // namespace
}  // namespace credx
