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

#include <cstddef>
#include <span>

#include "json.hpp"

#include "credx/matrix.hpp"
#include "credx/model.hpp"

namespace credx {

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  // Set when the metric's denominator is zero; the value is then reported as 0
  // (AUC as 0.5).
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
  bool auc_undefined = false;

  nlohmann::json ToJson() const;
};

// Area under the ROC curve as the Mann-Whitney rank statistic, with midranks
// for tied scores.
double RocAuc(std::span<const double> scores, std::span<const int> labels);

// Positive prediction when score >= threshold.
Metrics EvaluateScores(std::span<const double> scores, std::span<const int> labels,
                       double threshold = 0.5);
Metrics Evaluate(const ProbabilityModel& model, const Matrix& X, std::span<const int> y,
                 double threshold = 0.5);

}  // namespace credx
