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

#include "credx/metrics.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "credx/error.hpp"

#include "credx/random.hpp"

namespace credx {
namespace {

TEST(RocAuc, PairCountingExample) {
  // Pairs (0.9, 0.8) concordant and (0.7, 0.8) discordant.
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.9, 0.8, 0.7}, std::vector<int>{1, 0, 1}), 0.5);
}

TEST(RocAuc, RandomScoresNearHalf) {
  Rng rng(11);
  std::vector<double> s(10000);
  std::vector<int> y(10000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = Uniform01(rng);
    y[i] = static_cast<int>(i % 2);
  }
  EXPECT_NEAR(RocAuc(s, y), 0.5, 0.02);
}

TEST(RocAuc, InvariantUnderMonotoneTransform) {
  Rng rng(5);
  std::vector<double> s(500), t(500);
  std::vector<int> y(500);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = Uniform01(rng);
    y[i] = Uniform01(rng) < s[i] ? 1 : 0;
    t[i] = std::exp(3.0 * s[i]) - 7.0;
  }
  EXPECT_DOUBLE_EQ(RocAuc(s, y), RocAuc(t, y));
}

TEST(Evaluate, PerfectPredictions) {
  const std::vector<double> s = {0.9, 0.1, 0.8, 0.2};
  const std::vector<int> y = {1, 0, 1, 0};
  const Metrics m = EvaluateScores(s, y);
  EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.precision, 1.0);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  EXPECT_DOUBLE_EQ(m.f1, 1.0);
  EXPECT_DOUBLE_EQ(m.roc_auc, 1.0);
}

TEST(Evaluate, NoPredictedPositivesFlagsPrecision) {
  const std::vector<double> s = {0.1, 0.2, 0.3};
  const std::vector<int> y = {1, 0, 1};
  const Metrics m = EvaluateScores(s, y);
  EXPECT_TRUE(m.precision_undefined);
  EXPECT_DOUBLE_EQ(m.precision, 0.0);
  EXPECT_DOUBLE_EQ(m.recall, 0.0);
}

TEST(Evaluate, F1IsHarmonicMean) {
  const std::vector<double> s = {0.9, 0.7, 0.6, 0.4, 0.3, 0.2};
  const std::vector<int> y = {1, 0, 1, 1, 0, 0};
  const Metrics m = EvaluateScores(s, y);
  EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-15);
  EXPECT_NEAR(m.precision, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.recall, 2.0 / 3.0, 1e-15);
}

}  // namespace
}  // namespace credx
