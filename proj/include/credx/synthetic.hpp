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

#include <cstdint>

#include "json.hpp"

#include "credx/dataset.hpp"

namespace credx {

// Coefficients of the logistic default model behind the synthetic loan book:
//
//   logit P(default) = intercept
//                    + recoveries        * [recoveries > 0]
//                    + payment_shortfall * (1 - total_pymnt / loan_amnt)
//                    + interest          * (int_rate - 13) / 5
//                    + term              * [term == "60 months"]
//                    + inquiries         * inq_last_6mths
//
// Every other column is noise or a deterministic function of the drivers.
struct SyntheticConfig {
  double intercept = -2.0;
  double recoveries = 3.0;
  double payment_shortfall = 4.0;
  double interest = 0.8;
  double term = 0.0;
  double inquiries = 0.0;
  double recovery_rate = 0.15;
  double recovery_floor = 50.0;  // smallest nonzero recoveries amount
  double other_status_rate = 0.05;

  // One rare, strong driver (recoveries) and four weak ones.
  static SyntheticConfig DominantDriver();

  double Logit(bool has_recoveries, double pay_ratio, double int_rate, bool long_term,
               int inquiries_count) const;
  nlohmann::json ToJson() const;
};

Schema SyntheticSchema();

// Deterministic in (n, seed, config); n must be at least 100.
Dataset GenerateSynthetic(std::size_t n, std::uint64_t seed, const SyntheticConfig& config = {});

}  // namespace credx
