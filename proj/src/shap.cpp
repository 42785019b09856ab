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
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "credx/error.hpp"
#include "credx/kernels.hpp"
#include "credx/random.hpp"
#include "linalg.hpp"

namespace credx {
namespace {

// Predictions for a batch of coalitions. Each coalition expands to K hybrid
// rows, evaluated in chunks to bound memory.
class CoalitionEvaluator {
 public:
  CoalitionEvaluator(const Predictor& model, std::span<const double> x, const Background& bg)
      : model_(model), x_(x), bg_(bg) {}

  // `masks` holds n_masks rows of D bytes.
  std::vector<double> Evaluate(std::span<const std::uint8_t> masks) const {
    const std::size_t d = x_.size();
    const std::size_t k = bg_.size();
    const std::size_t n_masks = d == 0 ? 0 : masks.size() / d;
    std::vector<double> values(n_masks, 0.0);
    const std::size_t per_chunk = std::max<std::size_t>(1, kChunkRows / std::max<std::size_t>(k, 1));
    Matrix hybrid;
    std::vector<double> out;
    for (std::size_t start = 0; start < n_masks; start += per_chunk) {
      const std::size_t count = std::min(per_chunk, n_masks - start);
      if (hybrid.rows() != count * k) hybrid = Matrix(count * k, d);
      for (std::size_t m = 0; m < count; ++m) {
        const std::uint8_t* mask = masks.data() + (start + m) * d;
        for (std::size_t b = 0; b < k; ++b) {
          auto dst = hybrid.row(m * k + b);
          const auto src = bg_.rows.row(b);
          for (std::size_t j = 0; j < d; ++j) dst[j] = mask[j] ? x_[j] : src[j];
        }
      }
      out.resize(count * k);
      model_.PredictBatch(hybrid, out);
      for (std::size_t m = 0; m < count; ++m) {
        double v = 0.0;
        for (std::size_t b = 0; b < k; ++b) v += bg_.weights[b] * out[m * k + b];
        values[start + m] = v;
      }
    }
    return values;
  }

 private:
  static constexpr std::size_t kChunkRows = 1 << 15;
  const Predictor& model_;
  std::span<const double> x_;
  const Background& bg_;
};

void CheckInputs(const Predictor& model, std::span<const double> x, const Background& bg) {
  if (x.size() != model.num_features() || bg.rows.cols() != x.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("instance has {} features, model {}, background {}", x.size(),
                            model.num_features(), bg.rows.cols()));
  }
  if (bg.size() == 0 || bg.weights.size() != bg.size()) {
    throw Error(ErrorCode::kInvalidArgument, "background needs rows with matching weights");
  }
}

double BaseValue(const CoalitionEvaluator& eval, std::size_t d) {
  const std::vector<std::uint8_t> empty(d, 0);
  return eval.Evaluate(empty)[0];
}

double Binomial(std::size_t n, std::size_t k) {
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                  std::lgamma(static_cast<double>(k) + 1.0) -
                  std::lgamma(static_cast<double>(n - k) + 1.0));
}

struct Coalitions {
  std::vector<std::uint8_t> masks;  // rows of D bytes
  std::vector<double> weights;
};

Coalitions AllCoalitions(std::size_t d) {
  Coalitions c;
  const std::uint64_t total = std::uint64_t{1} << d;
  c.masks.reserve((total - 2) * d);
  for (std::uint64_t bits = 1; bits + 1 < total; ++bits) {
    for (std::size_t j = 0; j < d; ++j) c.masks.push_back((bits >> j) & 1U);
    c.weights.push_back(CoalitionWeight(d, static_cast<std::size_t>(std::popcount(bits))));
  }
  return c;
}

// Size drawn with probability proportional to (M-1)/(s(M-s)), i.e. the total
// kernel mass at that size; members uniform. Each draw also adds the
// complement. Repeats accumulate as counts, which become regression weights.
Coalitions SampledCoalitions(std::size_t d, std::size_t budget, Rng& rng) {
  std::vector<double> cdf(d - 1);
  double total = 0.0;
  for (std::size_t s = 1; s < d; ++s) {
    total += static_cast<double>(d - 1) / static_cast<double>(s * (d - s));
    cdf[s - 1] = total;
  }
  Coalitions c;
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<std::size_t> perm(d);
  std::string key(d, '\0');
  const auto add = [&](const std::string& k) {
    const auto [it, inserted] = seen.try_emplace(k, c.weights.size());
    if (inserted) {
      c.masks.insert(c.masks.end(), k.begin(), k.end());
      c.weights.push_back(1.0);
    } else {
      c.weights[it->second] += 1.0;
    }
  };
  const std::size_t pairs = std::max<std::size_t>(1, budget / 2);
  for (std::size_t p = 0; p < pairs; ++p) {
    const double u = Uniform01(rng) * total;
    const std::size_t s =
        std::min<std::size_t>(d - 1, 1 + (std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::fill(key.begin(), key.end(), '\0');
    for (std::size_t i = 0; i < s; ++i) {
      std::swap(perm[i], perm[i + UniformIndex(rng, d - i)]);
      key[perm[i]] = '\1';
    }
    add(key);
    for (char& ch : key) ch = ch ? '\0' : '\1';
    add(key);
  }
  return c;
}

// Weighted least squares for phi under sum(phi) = fx - base. The last
// feature is eliminated: phi_last = delta - sum(others).
std::vector<double> SolveConstrained(const Coalitions& c, std::span<const double> values,
                                     std::size_t d, double base, double fx) {
  const double delta = fx - base;
  if (d == 1) return {delta};
  const std::size_t p = d - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  Eigen::VectorXd a(static_cast<Eigen::Index>(p));
  for (std::size_t n = 0; n < c.weights.size(); ++n) {
    const std::uint8_t* z = c.masks.data() + n * d;
    const double z_last = z[d - 1];
    for (std::size_t j = 0; j < p; ++j) a[static_cast<Eigen::Index>(j)] = z[j] - z_last;
    const double y = values[n] - base - z_last * delta;
    const double w = c.weights[n];
    A.selfadjointView<Eigen::Lower>().rankUpdate(a, w);
    b.noalias() += (w * y) * a;
  }
  A = A.selfadjointView<Eigen::Lower>();
  auto solved = internal::SolveSymmetric(A, b);
  if (!solved) {
    A.diagonal().array() += 1e-10;
    solved = internal::SolveSymmetric(A, b);
    if (!solved) throw Error(ErrorCode::kSingularSystem, "coalition regression is singular");
  }
  std::vector<double> phi(d);
  double sum = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    phi[j] = (*solved)[static_cast<Eigen::Index>(j)];
    sum += phi[j];
  }
  phi[d - 1] = delta - sum;
  return phi;
}

}  // namespace

double ShapResult::LocalAccuracyGap() const {
  const double total = std::accumulate(phi.begin(), phi.end(), base_value);
  return std::abs(total - fx);
}

std::size_t DefaultCoalitionBudget(std::size_t num_features) {
  const std::size_t cap = 2 * num_features + 2048;
  if (num_features >= 63) return cap;
  return std::min<std::size_t>(std::size_t{1} << num_features, cap);
}

double CoalitionWeight(std::size_t M, std::size_t s) {
  if (s == 0 || s >= M) {
    throw Error(ErrorCode::kDomainError,
                fmt::format("coalition size {} outside (0, {})", s, M));
  }
  return static_cast<double>(M - 1) /
         (Binomial(M, s) * static_cast<double>(s) * static_cast<double>(M - s));
}

double MaskedPrediction(const Predictor& model, std::span<const double> x,
                        std::span<const std::uint8_t> mask, const Background& bg) {
  CheckInputs(model, x, bg);
  if (mask.size() != x.size()) throw Error(ErrorCode::kShapeMismatch, "mask length differs from D");
  return CoalitionEvaluator(model, x, bg).Evaluate(mask)[0];
}

ShapResult ExactShapley(const Predictor& model, std::span<const double> x, const Background& bg) {
  CheckInputs(model, x, bg);
  const std::size_t d = x.size();
  if (d > kMaxExactFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                fmt::format("exact enumeration supports at most {} features, got {}",
                            kMaxExactFeatures, d));
  }
  ShapResult r;
  r.phi.assign(d, 0.0);
  r.fx = model.Predict(x);
  const CoalitionEvaluator eval(model, x, bg);
  r.base_value = BaseValue(eval, d);
  if (d == 0) return r;

  // v indexed by bitmask over features.
  const std::uint64_t total = std::uint64_t{1} << d;
  std::vector<std::uint8_t> masks(total * d);
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (std::size_t j = 0; j < d; ++j) masks[bits * d + j] = (bits >> j) & 1U;
  }
  std::vector<double> v = eval.Evaluate(masks);
  v.front() = r.base_value;
  v.back() = r.fx;

  // |S|! (D-|S|-1)! / D!
  std::vector<double> factorial(d + 1, 1.0);
  for (std::size_t i = 1; i <= d; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
  std::vector<double> weight(d);
  for (std::size_t s = 0; s < d; ++s) weight[s] = factorial[s] * factorial[d - s - 1] / factorial[d];

  for (std::uint64_t bits = 0; bits < total; ++bits) {
    const auto s = static_cast<std::size_t>(std::popcount(bits));
    for (std::size_t j = 0; j < d; ++j) {
      if ((bits >> j) & 1U) continue;
      r.phi[j] += weight[s] * (v[bits | (std::uint64_t{1} << j)] - v[bits]);
    }
  }
  return r;
}

ShapResult KernelShap(const Predictor& model, std::span<const double> x, const Background& bg,
                      const ShapConfig& config) {
  CheckInputs(model, x, bg);
  const std::size_t d = x.size();
  ShapResult r;
  r.fx = model.Predict(x);
  const CoalitionEvaluator eval(model, x, bg);
  r.base_value = BaseValue(eval, d);
  if (d == 0) return r;
  if (d == 1) {
    r.phi = {r.fx - r.base_value};
    return r;
  }

  const std::size_t budget = config.n_coalitions.value_or(DefaultCoalitionBudget(d));
  const bool covers_all = d < 63 && budget + 2 >= (std::size_t{1} << d);
  const bool exhaustive =
      config.exhaustive || (covers_all && d <= kMaxExhaustiveFeatures);
  if (exhaustive && d > kMaxExhaustiveFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                fmt::format("exhaustive mode supports at most {} features, got {}",
                            kMaxExhaustiveFeatures, d));
  }
  Coalitions coalitions;
  if (exhaustive) {
    coalitions = AllCoalitions(d);
  } else {
    Rng rng(config.seed);
    coalitions = SampledCoalitions(d, budget, rng);
  }
  const std::vector<double> values = eval.Evaluate(coalitions.masks);
  r.phi = SolveConstrained(coalitions, values, d, r.base_value, r.fx);
  return r;
}

double ShapMatrix::MaxLocalAccuracyGap() const {
  double worst = 0.0;
  for (const auto& r : results) worst = std::max(worst, r.LocalAccuracyGap());
  return worst;
}

std::vector<double> ShapMatrix::MeanAbsPhi() const {
  std::vector<double> mean(cols(), 0.0);
  if (results.empty()) return mean;
  for (const auto& r : results) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += std::abs(r.phi[j]);
  }
  for (double& m : mean) m /= static_cast<double>(results.size());
  return mean;
}

nlohmann::json ShapMatrix::ToJson() const {
  nlohmann::json phi_rows = nlohmann::json::array();
  std::vector<double> base, fx;
  for (const auto& r : results) {
    phi_rows.push_back(r.phi);
    base.push_back(r.base_value);
    fx.push_back(r.fx);
  }
  return {{"feature_names", feature_names},
          {"base_value", base},
          {"fx", fx},
          {"phi", phi_rows},
          {"max_local_accuracy_gap", MaxLocalAccuracyGap()}};
}

ShapMatrix ShapMatrix::FromJson(const nlohmann::json& j) {
  try {
    ShapMatrix m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto& phi = j.at("phi");
    const auto base = j.at("base_value").get<std::vector<double>>();
    const auto fx = j.at("fx").get<std::vector<double>>();
    if (phi.size() != base.size() || fx.size() != base.size()) {
      throw Error(ErrorCode::kFormat, "shap matrix arrays differ in length");
    }
    for (std::size_t r = 0; r < phi.size(); ++r) {
      ShapResult res{phi[r].get<std::vector<double>>(), base[r], fx[r]};
      if (res.phi.size() != m.feature_names.size()) {
        throw Error(ErrorCode::kShapeMismatch, "shap row width differs from feature count");
      }
      m.results.push_back(std::move(res));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed shap matrix: ") + e.what());
  }
}

void ShapMatrix::WriteCsv(std::ostream& out) const {
  for (const auto& name : feature_names) out << name << ',';
  out << "base_value,fx\n";
  for (const auto& r : results) {
    for (double v : r.phi) out << fmt::format("{},", v);
    out << fmt::format("{},{}\n", r.base_value, r.fx);
  }
}

void ShapMatrix::WriteTimingCsv(std::ostream& out) const {
  out << "row,seconds\n";
  for (std::size_t i = 0; i < seconds.size(); ++i) out << fmt::format("{},{}\n", i, seconds[i]);
}

ShapMatrix ComputeShapMatrix(const Predictor& model, const Matrix& X_explain,
                             const Background& bg, const ShapConfig& config,
                             std::vector<std::string> names, int jobs,
                             const ShapProgress& progress) {
  if (names.size() != X_explain.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "feature names differ from explanation columns");
  }
  if (jobs > 1) {
    return kernels::ShapMatrixParallel(model, X_explain, bg, config, std::move(names), jobs,
                                       progress);
  }
  return kernels::ShapMatrixSerial(model, X_explain, bg, config, std::move(names), progress);
}

std::vector<std::size_t> TopFeatures(std::span<const double> scores, std::size_t n) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(std::min(n, idx.size()));
  return idx;
}

double Jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  std::vector<std::size_t> inter, uni;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(inter));
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(uni));
  if (uni.empty()) return 1.0;
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

}  // namespace credx
