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

#include "credx/synthetic.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "credx/error.hpp"

namespace credx {
namespace {

std::string Csv(const Dataset& d) {
  std::ostringstream ss;
  WriteCsv(ss, d);
  return ss.str();
}

TEST(GenerateSynthetic, RowCountAndBothClasses) {
  const Dataset d = GenerateSynthetic(1000, 7);
  EXPECT_EQ(d.rows(), 1000u);
  const Dataset b = BinarizeTarget(d);
  const auto positives = std::count(b.target.begin(), b.target.end(), 1);
  EXPECT_GT(positives, 0);
  EXPECT_LT(positives, static_cast<long>(b.target.size()));
}

TEST(GenerateSynthetic, SameSeedSameBytes) {
  EXPECT_EQ(Csv(GenerateSynthetic(500, 7)), Csv(GenerateSynthetic(500, 7)));
  EXPECT_NE(Csv(GenerateSynthetic(500, 7)), Csv(GenerateSynthetic(500, 8)));
}

TEST(GenerateSynthetic, CsvRoundTripsThroughSchema) {
  const Dataset d = GenerateSynthetic(200, 1);
  std::istringstream in(Csv(d));
  const Dataset back = ParseCsv(in, SyntheticSchema());
  EXPECT_EQ(Csv(back), Csv(d));
}

TEST(GenerateSynthetic, RecoveriesRaiseDefaultRate) {
  const Dataset d = BinarizeTarget(GenerateSynthetic(20000, 11));
  const Column& rec = d.columns[*d.index_of("recoveries")];
  double all = 0, with = 0, n_with = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    all += d.target[r];
    if (rec.numeric[r] > 0) {
      with += d.target[r];
      ++n_with;
    }
  }
  ASSERT_GT(n_with, 0);
  EXPECT_GT(with / n_with, all / static_cast<double>(d.rows()));
}

TEST(SyntheticConfig, GroundTruthDocument) {
  const auto j = SyntheticConfig{}.ToJson();
  EXPECT_GT(j.at("coefficients").at("recoveries").get<double>(), 0.0);
  EXPECT_TRUE(j.contains("formula"));
}

}  // namespace
}  // namespace credx
