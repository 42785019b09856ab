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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "credx/error.hpp"
#include "credx/random.hpp"
#include "credx/stats.hpp"
#include "linalg.hpp"

namespace credx {
namespace {

BinStats Describe(const std::vector<double>& values) {
  BinStats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

double TruncatedNormal(Rng& rng, const BinStats& s) {
  if (s.sd <= 0.0 || s.max <= s.min) return s.mean;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double v = s.mean + s.sd * StandardNormal(rng);
    if (v >= s.min && v <= s.max) return v;
  }
  return s.min + (s.max - s.min) * Uniform01(rng);
}

}  // namespace

double LimeConfig::ResolvedKernelWidth(std::size_t num_features) const {
  if (kernel_width) {
    if (!(*kernel_width > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "kernel width must be positive");
    }
    return *kernel_width;
  }
  return 0.75 * std::sqrt(static_cast<double>(num_features));
}

Discretizer Discretizer::Fit(const Matrix& X_train, const std::vector<std::string>& names) {
  if (X_train.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "discretizer needs data");
  if (names.size() != X_train.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "discretizer: names and columns differ");
  }
  Discretizer disc;
  for (std::size_t f = 0; f < X_train.cols(); ++f) {
    FeatureBins fb;
    fb.name = names[f];
    std::vector<double> col = X_train.column(f);
    const BinStats whole = Describe(col);
    fb.mean = whole.mean;
    fb.sd = whole.sd;
    std::sort(col.begin(), col.end());
    std::vector<double> distinct = col;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    if (distinct.size() < 4) {
      fb.categorical_like = true;
      fb.levels = distinct;
      for (double level : distinct) {
        const auto [lo, hi] = std::equal_range(col.begin(), col.end(), level);
        const std::vector<double> members(lo, hi);
        fb.bins.push_back(Describe(members));
        fb.frequencies.push_back(static_cast<double>(members.size()) /
                                 static_cast<double>(col.size()));
      }
    } else {
      for (double p : {0.25, 0.5, 0.75}) {
        const double e = SortedQuantile(col, p);
        if (fb.edges.empty() || e > fb.edges.back()) fb.edges.push_back(e);
      }
      std::vector<std::vector<double>> members(fb.edges.size() + 1);
      for (double v : col) {
        const auto bin = static_cast<std::size_t>(
            std::lower_bound(fb.edges.begin(), fb.edges.end(), v) - fb.edges.begin());
        members[bin].push_back(v);
      }
      for (const auto& m : members) fb.bins.push_back(Describe(m));
    }
    disc.features_.push_back(std::move(fb));
  }
  return disc;
}

std::size_t Discretizer::Bin(std::size_t feature, double value) const {
  const FeatureBins& fb = features_[feature];
  if (fb.categorical_like) {
    // Nearest level; exact for values seen in training.
    const auto it = std::lower_bound(fb.levels.begin(), fb.levels.end(), value);
    if (it == fb.levels.end()) return fb.levels.size() - 1;
    const auto idx = static_cast<std::size_t>(it - fb.levels.begin());
    if (idx > 0 && value - fb.levels[idx - 1] < *it - value) return idx - 1;
    return idx;
  }
  // Number of edges strictly below the value: closed-left bins (a, b].
  return static_cast<std::size_t>(std::lower_bound(fb.edges.begin(), fb.edges.end(), value) -
                                  fb.edges.begin());
}

std::string Discretizer::Condition(std::size_t feature, std::size_t bin) const {
  const FeatureBins& fb = features_[feature];
  if (fb.categorical_like) return fmt::format("{} = {:g}", fb.name, fb.levels[bin]);
  if (bin == 0) return fmt::format("{} <= {:.2f}", fb.name, fb.edges.front());
  if (bin == fb.edges.size()) return fmt::format("{} > {:.2f}", fb.name, fb.edges.back());
  return fmt::format("{:.2f} < {} <= {:.2f}", fb.edges[bin - 1], fb.name, fb.edges[bin]);
}

PerturbationSample SamplePerturbations(std::span<const double> x, const Discretizer& disc,
                                       const LimeConfig& config) {
  const std::size_t d = disc.num_features();
  if (x.size() != d) throw Error(ErrorCode::kShapeMismatch, "instance width differs from training");
  const std::size_t n = std::max<std::size_t>(config.n_samples, 1);
  PerturbationSample s{Matrix(n, d), Matrix(n, d)};
  Rng rng(config.seed);

  if (config.discretizer == DiscretizerKind::kNone) {
    for (std::size_t f = 0; f < d; ++f) {
      const FeatureBins& fb = disc.feature(f);
      const double scale = fb.sd > 0 ? fb.sd : 1.0;
      s.raw(0, f) = x[f];
      s.interpretable(0, f) = (x[f] - fb.mean) / scale;
    }
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t f = 0; f < d; ++f) {
        const FeatureBins& fb = disc.feature(f);
        const double scale = fb.sd > 0 ? fb.sd : 1.0;
        const double z = StandardNormal(rng);
        s.raw(i, f) = fb.mean + z * fb.sd;
        s.interpretable(i, f) = (s.raw(i, f) - fb.mean) / scale;
      }
    }
    return s;
  }

  std::vector<std::size_t> own_bin(d);
  std::vector<std::vector<std::size_t>> live_bins(d);
  std::vector<std::vector<double>> cumulative(d);
  for (std::size_t f = 0; f < d; ++f) {
    own_bin[f] = disc.Bin(f, x[f]);
    s.raw(0, f) = x[f];
    s.interpretable(0, f) = 1.0;
    const FeatureBins& fb = disc.feature(f);
    if (fb.categorical_like) {
      std::partial_sum(fb.frequencies.begin(), fb.frequencies.end(),
                       std::back_inserter(cumulative[f]));
    } else {
      for (std::size_t b = 0; b < fb.bins.size(); ++b) {
        if (fb.bins[b].count > 0) live_bins[f].push_back(b);
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t f = 0; f < d; ++f) {
      const FeatureBins& fb = disc.feature(f);
      std::size_t bin;
      if (fb.categorical_like) {
        const double u = Uniform01(rng) * cumulative[f].back();
        bin = static_cast<std::size_t>(
            std::upper_bound(cumulative[f].begin(), cumulative[f].end(), u) - cumulative[f].begin());
        bin = std::min(bin, fb.levels.size() - 1);
        s.raw(i, f) = fb.levels[bin];
      } else {
        bin = live_bins[f][UniformIndex(rng, live_bins[f].size())];
        s.raw(i, f) = TruncatedNormal(rng, fb.bins[bin]);
      }
      s.interpretable(i, f) = bin == own_bin[f] ? 1.0 : 0.0;
    }
  }
  return s;
}

std::vector<double> ProximityWeights(const Matrix& interpretable, const LimeConfig& config) {
  const double width = config.ResolvedKernelWidth(interpretable.cols());
  std::vector<double> w(interpretable.rows());
  if (interpretable.rows() == 0) return w;
  const auto origin = interpretable.row(0);
  for (std::size_t i = 0; i < interpretable.rows(); ++i) {
    const auto row = interpretable.row(i);
    double d2 = 0.0;
    for (std::size_t f = 0; f < row.size(); ++f) d2 += (row[f] - origin[f]) * (row[f] - origin[f]);
    w[i] = std::exp(-d2 / (width * width));
  }
  return w;
}

RidgeSolution WeightedRidge(const Matrix& Z, std::span<const std::size_t> columns,
                            std::span<const double> targets, std::span<const double> weights,
                            double penalty) {
  const std::size_t n = Z.rows();
  const std::size_t k = columns.size();
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(wsum > 0.0)) throw Error(ErrorCode::kSingularSystem, "all proximity weights are zero");
  Eigen::VectorXd zbar = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  double ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) zbar(static_cast<Eigen::Index>(j)) += weights[i] * Z(i, columns[j]);
    ybar += weights[i] * targets[i];
  }
  zbar /= wsum;
  ybar /= wsum;

  const auto ki = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ki, ki);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ki);
  Eigen::VectorXd zc(ki);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      zc(static_cast<Eigen::Index>(j)) = Z(i, columns[j]) - zbar(static_cast<Eigen::Index>(j));
    }
    A.selfadjointView<Eigen::Lower>().rankUpdate(zc, weights[i]);
    b += weights[i] * (targets[i] - ybar) * zc;
  }
  A = A.selfadjointView<Eigen::Lower>();

  double current = penalty;
  for (int escalation = 0; escalation <= 3; ++escalation) {
    Eigen::MatrixXd regularized = A;
    regularized.diagonal().array() += current;
    if (auto beta = internal::SolveSymmetric(regularized, b)) {
      RidgeSolution sol;
      sol.coefficients.assign(beta->data(), beta->data() + beta->size());
      sol.intercept = ybar - zbar.dot(*beta);
      sol.penalty = current;
      return sol;
    }
    current = current > 0.0 ? current * 10.0 : 1e-6;
  }
  throw Error(ErrorCode::kSingularSystem, "surrogate system singular after ridge escalation");
}

SurrogateFit FitSurrogate(const Matrix& interpretable, std::span<const double> targets,
                          std::span<const double> weights, const LimeConfig& config) {
  const std::size_t d = interpretable.cols();
  if (targets.size() != interpretable.rows() || weights.size() != interpretable.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "surrogate inputs differ in length");
  }
  if (config.top_k == 0 || config.top_k > d) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("top_k must lie in [1, {}]", d));
  }
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const RidgeSolution full = WeightedRidge(interpretable, all, targets, weights, config.ridge_penalty);

  std::vector<std::size_t> order = all;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(full.coefficients[a]) > std::abs(full.coefficients[b]);
  });
  order.resize(config.top_k);
  std::vector<std::size_t> support = order;
  std::sort(support.begin(), support.end());
  const RidgeSolution refit = WeightedRidge(interpretable, support, targets, weights, full.penalty);

  SurrogateFit fit;
  fit.full_coefficients = full.coefficients;
  fit.full_intercept = full.intercept;
  fit.intercept = refit.intercept;
  fit.ridge_penalty = refit.penalty;
  std::vector<std::pair<std::size_t, double>> ranked;
  for (std::size_t j = 0; j < support.size(); ++j) ranked.emplace_back(support[j], refit.coefficients[j]);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  for (const auto& [f, c] : ranked) {
    fit.selected.push_back(f);
    fit.coefficients.push_back(c);
  }

  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  double ybar = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) ybar += weights[i] * targets[i];
  ybar /= wsum;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double pred = refit.intercept;
    for (std::size_t j = 0; j < support.size(); ++j) {
      pred += refit.coefficients[j] * interpretable(i, support[j]);
    }
    ss_res += weights[i] * (targets[i] - pred) * (targets[i] - pred);
    ss_tot += weights[i] * (targets[i] - ybar) * (targets[i] - ybar);
  }
  if (ss_tot > 1e-300) {
    fit.r2 = 1.0 - ss_res / ss_tot;
  } else {
    fit.r2 = ss_res <= 1e-24 ? 1.0 : 0.0;
  }
  return fit;
}

nlohmann::json LocalExplanation::ToJson() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& e : entries) {
    items.push_back({{"condition", e.condition}, {"feature", e.feature_name}, {"weight", e.weight}});
  }
  return {{"instance_id", instance_id},
          {"predicted_class", predicted_class},
          {"class_probabilities", {1.0 - probability, probability}},
          {"intercept", intercept},
          {"r2", r2},
          {"entries", items},
          {"top_k_sum", top_k_sum},
          {"full_ridge_sum", full_ridge_sum}};
}

std::string LocalExplanation::RenderTable() const {
  std::size_t width = 9;
  for (const auto& e : entries) width = std::max(width, e.condition.size());
  std::string out = fmt::format("instance {}: P(Fully Paid) = {:.4f}, P(Default) = {:.4f}\n",
                                instance_id, 1.0 - probability, probability);
  out += fmt::format("{:<{}}  {:>10}  {}\n", "condition", width, "weight", "favors");
  for (const auto& e : entries) {
    out += fmt::format("{:<{}}  {:>+10.4f}  {}\n", e.condition, width, e.weight,
                       e.weight > 0 ? "Default" : "Fully Paid");
  }
  out += fmt::format("top-{} sum {:+.4f}, all-feature sum {:+.4f}, r2 {:.4f}\n", entries.size(),
                     top_k_sum, full_ridge_sum, r2);
  return out;
}

LocalExplanation ExplainInstance(const Predictor& model, std::span<const double> x,
                                 const Discretizer& disc, const LimeConfig& config,
                                 std::size_t instance_id) {
  if (model.num_features() != x.size()) {
    throw Error(ErrorCode::kShapeMismatch, "instance width differs from the model");
  }
  const PerturbationSample sample = SamplePerturbations(x, disc, config);
  std::vector<double> probs(sample.raw.rows());
  model.PredictBatch(sample.raw, probs);
  const auto weights = ProximityWeights(sample.interpretable, config);
  const SurrogateFit fit = FitSurrogate(sample.interpretable, probs, weights, config);

  LocalExplanation ex;
  ex.instance_id = instance_id;
  ex.probability = probs[0];
  ex.predicted_class = probs[0] >= 0.5 ? 1 : 0;
  ex.intercept = fit.intercept;
  ex.r2 = fit.r2;
  for (std::size_t j = 0; j < fit.selected.size(); ++j) {
    const std::size_t f = fit.selected[j];
    ExplanationEntry e;
    e.feature = f;
    e.feature_name = disc.feature(f).name;
    e.condition = config.discretizer == DiscretizerKind::kQuartile ? disc.Condition(f, disc.Bin(f, x[f]))
                                                                   : e.feature_name;
    e.weight = fit.coefficients[j];
    ex.top_k_sum += e.weight;
    ex.entries.push_back(std::move(e));
  }
  ex.full_ridge_sum =
      std::accumulate(fit.full_coefficients.begin(), fit.full_coefficients.end(), 0.0);
  return ex;
}

}  // namespace credx
