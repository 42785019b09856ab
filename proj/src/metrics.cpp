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

#include "credx/error.hpp"
#include "credx/stats.hpp"

namespace credx {

nlohmann::json Metrics::ToJson() const {
  return {{"accuracy", accuracy},
          {"precision", precision},
          {"recall", recall},
          {"f1", f1},
          {"roc_auc", roc_auc},
          {"confusion", {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}}},
          {"undefined",
           {{"precision", precision_undefined},
            {"recall", recall_undefined},
            {"f1", f1_undefined},
            {"roc_auc", auc_undefined}}}};
}

double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "AUC: scores and labels differ in length");
  }
  const auto ranks = AverageRanks(scores);
  double positive_rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0) {
      positive_rank_sum += ranks[i];
      n_pos += 1.0;
    }
  }
  const double n_neg = static_cast<double>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

Metrics EvaluateScores(std::span<const double> scores, std::span<const int> labels,
                       double threshold) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "evaluate: scores and labels differ in length");
  }
  Metrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++m.tp;
    else if (predicted) ++m.fp;
    else if (actual) ++m.fn;
    else ++m.tn;
  }
  const auto d = [](std::size_t v) { return static_cast<double>(v); };
  m.accuracy = scores.empty() ? 0.0 : d(m.tp + m.tn) / d(scores.size());
  m.precision_undefined = m.tp + m.fp == 0;
  m.precision = m.precision_undefined ? 0.0 : d(m.tp) / d(m.tp + m.fp);
  m.recall_undefined = m.tp + m.fn == 0;
  m.recall = m.recall_undefined ? 0.0 : d(m.tp) / d(m.tp + m.fn);
  m.f1_undefined = m.precision + m.recall == 0.0;
  m.f1 = m.f1_undefined ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.auc_undefined = m.tp + m.fn == 0 || m.fp + m.tn == 0;
  m.roc_auc = RocAuc(scores, labels);
  return m;
}

Metrics Evaluate(const ProbabilityModel& model, const Matrix& X, std::span<const int> y,
                 double threshold) {
  const auto scores = model.PredictProba(X);
  return EvaluateScores(scores, y, threshold);
}

}  // namespace credx
