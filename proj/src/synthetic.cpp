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

#include <array>
#include <cmath>
#include <string>

#include "credx/error.hpp"
#include "credx/random.hpp"
#include "credx/stats.hpp"

namespace credx {
namespace {

double Round2(double v) { return std::round(v * 100.0) / 100.0; }

template <std::size_t N>
std::size_t Categorical(Rng& rng, const std::array<double, N>& probs) {
  double u = Uniform01(rng);
  for (std::size_t i = 0; i < N; ++i) {
    if (u < probs[i]) return i;
    u -= probs[i];
  }
  return N - 1;
}

struct ColumnBuilder {
  Dataset d;

  std::size_t add(const std::string& name, ColumnKind kind) {
    Column c;
    c.name = name;
    c.kind = kind;
    d.columns.push_back(std::move(c));
    return d.columns.size() - 1;
  }
  void num(std::size_t c, double v) {
    d.columns[c].numeric.push_back(v);
    d.columns[c].missing.push_back(0);
  }
  void none(std::size_t c) {
    d.columns[c].numeric.push_back(0.0);
    d.columns[c].missing.push_back(1);
  }
  void text(std::size_t c, std::string v) {
    d.columns[c].text.push_back(std::move(v));
    d.columns[c].missing.push_back(0);
  }
};

}  // namespace

SyntheticConfig SyntheticConfig::DominantDriver() {
  // Rare but near-deterministic recoveries. The floor keeps the split
  // threshold far above the recoveries mean of any mixed k-means cluster.
  SyntheticConfig c;
  c.intercept = -3.4;
  c.recoveries = 8.0;
  c.payment_shortfall = 1.2;
  c.interest = 0.5;
  c.term = 1.2;
  c.inquiries = 0.3;
  c.recovery_rate = 0.03;
  c.recovery_floor = 500.0;
  return c;
}

double SyntheticConfig::Logit(bool has_recoveries, double pay_ratio, double int_rate,
                              bool long_term, int inquiries_count) const {
  return intercept + recoveries * (has_recoveries ? 1.0 : 0.0) +
         payment_shortfall * (1.0 - pay_ratio) + interest * (int_rate - 13.0) / 5.0 +
         term * (long_term ? 1.0 : 0.0) + inquiries * inquiries_count;
}

nlohmann::json SyntheticConfig::ToJson() const {
  return {
      {"formula",
       "logit = intercept + recoveries*[recoveries>0] + payment_shortfall*(1 - "
       "total_pymnt/loan_amnt) + interest*(int_rate-13)/5 + term*[term=='60 months'] + "
       "inquiries*inq_last_6mths"},
      {"coefficients",
       {{"intercept", intercept},
        {"recoveries", recoveries},
        {"payment_shortfall", payment_shortfall},
        {"interest", interest},
        {"term", term},
        {"inquiries", inquiries}}},
      {"recovery_rate", recovery_rate},
      {"recovery_floor", recovery_floor},
      {"other_status_rate", other_status_rate},
  };
}

Schema SyntheticSchema() {
  Schema s;
  s.columns = {
      {"loan_amnt", ColumnKind::kNumeric},
      {"funded_amnt", ColumnKind::kNumeric},
      {"term", ColumnKind::kCategorical},
      {"int_rate", ColumnKind::kNumeric},
      {"grade", ColumnKind::kCategorical},
      {"home_ownership", ColumnKind::kCategorical},
      {"annual_inc", ColumnKind::kNumeric},
      {"purpose", ColumnKind::kCategorical},
      {"dti", ColumnKind::kNumeric},
      {"inq_last_6mths", ColumnKind::kCategorical},
      {"revol_util", ColumnKind::kNumeric},
      {"open_acc", ColumnKind::kNumeric},
      {"mths_since_last_record", ColumnKind::kNumeric},
      {"total_pymnt", ColumnKind::kNumeric},
      {"total_rec_int", ColumnKind::kNumeric},
      {"recoveries", ColumnKind::kNumeric},
      {"last_pymnt_amnt", ColumnKind::kNumeric},
      {"loan_status", ColumnKind::kTarget},
  };
  s.grade_column = "grade";
  return s;
}

Dataset GenerateSynthetic(std::size_t n, std::uint64_t seed, const SyntheticConfig& config) {
  if (n < 100) throw Error(ErrorCode::kInvalidArgument, "synthetic generator needs n >= 100");
  static constexpr std::array<const char*, 7> kGrades{"A", "B", "C", "D", "E", "F", "G"};
  static constexpr std::array<double, 7> kGradeProbs{0.18, 0.29, 0.27, 0.14, 0.07, 0.04, 0.01};
  static constexpr std::array<const char*, 3> kHomes{"MORTGAGE", "RENT", "OWN"};
  static constexpr std::array<double, 3> kHomeProbs{0.5, 0.4, 0.1};
  static constexpr std::array<const char*, 7> kPurposes{
      "debt_consolidation", "credit_card", "home_improvement", "other", "house", "wedding",
      "vacation"};
  static constexpr std::array<double, 7> kPurposeProbs{0.55, 0.22, 0.07, 0.08, 0.03, 0.02, 0.03};
  static constexpr std::array<double, 4> kInquiryProbs{0.48, 0.28, 0.15, 0.09};
  static constexpr std::array<const char*, 3> kOtherStatus{"Current", "Late (31-120 days)",
                                                           "In Grace Period"};

  ColumnBuilder b;
  const Schema schema = SyntheticSchema();
  for (const auto& [name, kind] : schema.columns) b.add(name, kind);
  enum : std::size_t {
    kLoan, kFunded, kTerm, kRate, kGrade, kHome, kIncome, kPurpose, kDti, kInq, kRevol,
    kOpen, kRecord, kPymnt, kRecInt, kRecov, kLast, kStatus
  };

  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double loan = std::round((1000.0 + 34000.0 * std::pow(Uniform01(rng), 1.4)) / 25.0) * 25.0;
    const double funded = loan - 25.0 * static_cast<double>(UniformIndex(rng, 4));
    const std::size_t grade = Categorical(rng, kGradeProbs);
    const bool long_term = Uniform01(rng) < 0.22 + 0.06 * static_cast<double>(grade);
    const double rate = std::max(5.31, Round2(6.5 + 3.1 * static_cast<double>(grade) +
                                               1.1 * StandardNormal(rng)));
    const double income = Round2(std::exp(11.0 + 0.5 * StandardNormal(rng)));
    const std::size_t purpose = Categorical(rng, kPurposeProbs);
    const double dti = Round2(std::clamp(18.0 + 8.0 * StandardNormal(rng), 0.0, 45.0));
    const int inquiries = static_cast<int>(Categorical(rng, kInquiryProbs));
    const double revol = Round2(std::clamp(52.0 + 24.0 * StandardNormal(rng), 0.0, 130.0));
    const double open_acc = std::round(std::max(1.0, 11.0 + 5.0 * StandardNormal(rng)));
    const bool has_record = Uniform01(rng) < 0.05;
    const double record_months = std::round(120.0 * Uniform01(rng));
    const double pay_ratio = 0.35 + 0.9 * Uniform01(rng);
    const double total_pymnt = Round2(loan * pay_ratio);
    const double interest_share =
        rate / 100.0 * (long_term ? 5.0 : 3.0) * 0.55;
    const double rec_int = Round2(total_pymnt * interest_share / (1.0 + interest_share));
    const bool has_recoveries = Uniform01(rng) < config.recovery_rate;
    const double recoveries =
        has_recoveries ? Round2(config.recovery_floor - 900.0 * std::log(1.0 - Uniform01(rng))) : 0.0;
    const bool payoff = Uniform01(rng) < 0.3;
    const double last_pymnt = Round2(payoff ? loan * (0.2 + 0.4 * Uniform01(rng))
                                            : loan / (long_term ? 60.0 : 36.0) *
                                                  (0.6 + 0.8 * Uniform01(rng)));
    const double p = Sigmoid(config.Logit(has_recoveries, total_pymnt / loan, rate, long_term,
                                          inquiries));
    const bool defaulted = Uniform01(rng) < p;
    const double status_u = Uniform01(rng);
    std::string status;
    if (status_u < config.other_status_rate) {
      status = kOtherStatus[UniformIndex(rng, kOtherStatus.size())];
    } else if (defaulted) {
      status = Uniform01(rng) < 0.8 ? "Charged Off" : "Default";
    } else {
      status = "Fully Paid";
    }
    const bool revol_missing = Uniform01(rng) < 0.01;

    b.num(kLoan, loan);
    b.num(kFunded, funded);
    b.text(kTerm, long_term ? "60 months" : "36 months");
    b.num(kRate, rate);
    b.text(kGrade, kGrades[grade]);
    b.text(kHome, kHomes[Categorical(rng, kHomeProbs)]);
    b.num(kIncome, income);
    b.text(kPurpose, kPurposes[purpose]);
    b.num(kDti, dti);
    b.text(kInq, std::to_string(inquiries));
    if (revol_missing) {
      b.none(kRevol);
    } else {
      b.num(kRevol, revol);
    }
    b.num(kOpen, open_acc);
    if (has_record) {
      b.num(kRecord, record_months);
    } else {
      b.none(kRecord);
    }
    b.num(kPymnt, total_pymnt);
    b.num(kRecInt, rec_int);
    b.num(kRecov, recoveries);
    b.num(kLast, last_pymnt);
    b.text(kStatus, status);
  }
  return std::move(b.d);
}

}  // namespace credx
