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

#include "credx/export.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "credx/ale.hpp"
#include "credx/error.hpp"
#include "credx/stats.hpp"

namespace credx {
namespace {

void CheckAligned(const ShapMatrix& sm, const Matrix& X) {
  if (X.rows() != sm.rows() || X.cols() != sm.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("shap matrix is {}x{} but data is {}x{}", sm.rows(), sm.cols(),
                            X.rows(), X.cols()));
  }
}

std::vector<double> PhiColumn(const ShapMatrix& sm, std::size_t j) {
  std::vector<double> out(sm.rows());
  for (std::size_t r = 0; r < sm.rows(); ++r) out[r] = sm.phi(r, j);
  return out;
}

nlohmann::json OptionalIndex(const std::optional<std::size_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json SummaryData::ToJson() const {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : features) {
    feats.push_back({{"feature", f.feature}, {"name", f.name}, {"mean_abs_phi", f.mean_abs_phi}});
  }
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"rank", p.rank},
                   {"instance", p.instance},
                   {"phi", p.phi},
                   {"value", p.value},
                   {"normalized_value", p.normalized_value}});
  }
  return {{"features", feats}, {"points", pts}};
}

void SummaryData::WriteCsv(std::ostream& out) const {
  out << "rank,feature,name,instance,phi,value,normalized_value\n";
  for (const auto& p : points) {
    const auto& f = features[p.rank];
    out << fmt::format("{},{},{},{},{},{},{}\n", p.rank, f.feature, f.name, p.instance, p.phi,
                       p.value, p.normalized_value);
  }
}

SummaryData MakeSummary(const ShapMatrix& sm, const Matrix& X_explain, std::size_t top_n) {
  CheckAligned(sm, X_explain);
  const std::vector<double> mean_abs = sm.MeanAbsPhi();
  SummaryData out;
  const auto top = TopFeatures(mean_abs, top_n);
  for (std::size_t rank = 0; rank < top.size(); ++rank) {
    const std::size_t j = top[rank];
    out.features.push_back({j, sm.feature_names[j], mean_abs[j]});
    const std::vector<double> col = X_explain.column(j);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    for (std::size_t r = 0; r < sm.rows(); ++r) {
      const double norm = (col.empty() || *hi == *lo) ? 0.5 : (col[r] - *lo) / (*hi - *lo);
      out.points.push_back({rank, r, sm.phi(r, j), col[r], norm});
    }
  }
  return out;
}

nlohmann::json DependenceData::ToJson() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) pts.push_back({p.x, p.phi, p.partner_x});
  return {{"feature", feature},
          {"feature_name", feature_name},
          {"partner", partner},
          {"partner_name", partner_name},
          {"partner_scores", partner_scores},
          {"columns", {"x", "phi", "partner_x"}},
          {"points", pts}};
}

void DependenceData::WriteCsv(std::ostream& out) const {
  out << "x,phi,partner_x\n";
  for (const auto& p : points) out << fmt::format("{},{},{}\n", p.x, p.phi, p.partner_x);
}

double InteractionScore(std::span<const double> x_j, std::span<const double> phi_j,
                        std::span<const double> x_k) {
  const std::size_t n = x_j.size();
  if (n == 0) return 0.0;
  std::vector<double> edges;
  try {
    edges = IntervalEdges(x_j, 10);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConstantFeature) throw;
    edges = {x_j[0], x_j[0]};
  }
  const std::size_t bins = edges.size() - 1;
  std::vector<std::vector<double>> bx(bins), bphi(bins);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = bins == 1 ? 0 : IntervalOf(edges, x_j[i]);
    bx[b].push_back(x_k[i]);
    bphi[b].push_back(phi_j[i]);
  }
  double score = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (bx[b].size() < 2) continue;
    const double r = Pearson(bx[b], bphi[b]);
    if (std::isfinite(r)) score += static_cast<double>(bx[b].size()) * std::abs(r);
  }
  return score / static_cast<double>(n);
}

DependenceData MakeDependence(const ShapMatrix& sm, const Matrix& X_explain, std::size_t feature) {
  CheckAligned(sm, X_explain);
  if (feature >= sm.cols()) throw Error(ErrorCode::kInvalidArgument, "feature index out of range");
  DependenceData out;
  out.feature = feature;
  out.feature_name = sm.feature_names[feature];
  const std::vector<double> x_j = X_explain.column(feature);
  const std::vector<double> phi_j = PhiColumn(sm, feature);
  out.partner_scores.assign(sm.cols(), 0.0);
  out.partner = feature;
  double best = -1.0;
  for (std::size_t k = 0; k < sm.cols(); ++k) {
    if (k == feature) continue;
    const double s = InteractionScore(x_j, phi_j, X_explain.column(k));
    out.partner_scores[k] = s;
    if (s > best) {
      best = s;
      out.partner = k;
    }
  }
  out.partner_name = sm.feature_names[out.partner];
  for (std::size_t r = 0; r < sm.rows(); ++r) {
    out.points.push_back({x_j[r], phi_j[r], X_explain(r, out.partner)});
  }
  return out;
}

nlohmann::json ForceData::ToJson() const {
  nlohmann::json stack_json = nlohmann::json::array();
  for (const auto& inst : stack) {
    nlohmann::json contrib = nlohmann::json::array();
    for (const auto& [j, phi] : inst.contributions) {
      contrib.push_back({{"feature", j}, {"name", feature_names[j]}, {"phi", phi}});
    }
    stack_json.push_back({{"instance", inst.instance},
                          {"base_value", inst.base_value},
                          {"fx", inst.fx},
                          {"sort_value", inst.sort_value ? nlohmann::json(*inst.sort_value)
                                                         : nlohmann::json(nullptr)},
                          {"contributions", contrib}});
  }
  nlohmann::json sort_json = sort.kind == ForceSort::Kind::kByOutput
                                 ? nlohmann::json{{"by", "output"}}
                                 : nlohmann::json{{"by", "feature"},
                                                  {"feature", sort.feature},
                                                  {"name", feature_names[sort.feature]}};
  return {{"sort", sort_json}, {"stack", stack_json}};
}

void ForceData::WriteCsv(std::ostream& out) const {
  out << "position,instance,base_value,fx,sort_value,feature,name,phi\n";
  for (std::size_t pos = 0; pos < stack.size(); ++pos) {
    const auto& inst = stack[pos];
    const std::string sv = inst.sort_value ? fmt::format("{}", *inst.sort_value) : "";
    for (const auto& [j, phi] : inst.contributions) {
      out << fmt::format("{},{},{},{},{},{},{},{}\n", pos, inst.instance, inst.base_value, inst.fx,
                         sv, j, feature_names[j], phi);
    }
  }
}

ForceData MakeForce(const ShapMatrix& sm, ForceSort sort, const Matrix* X_explain) {
  if (sm.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "force data needs explanations");
  if (sort.kind == ForceSort::Kind::kByFeature) {
    if (X_explain == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "feature sort needs the explained rows");
    }
    CheckAligned(sm, *X_explain);
    if (sort.feature >= sm.cols()) {
      throw Error(ErrorCode::kInvalidArgument, "sort feature out of range");
    }
  }
  ForceData out;
  out.feature_names = sm.feature_names;
  out.sort = sort;
  for (std::size_t r = 0; r < sm.rows(); ++r) {
    const ShapResult& res = sm.results[r];
    if (res.LocalAccuracyGap() > kExportLocalAccuracyTolerance) {
      throw Error(ErrorCode::kLocalAccuracy,
                  fmt::format("row {} misses local accuracy by {}", r, res.LocalAccuracyGap()));
    }
    ForceInstance inst;
    inst.instance = r;
    inst.base_value = res.base_value;
    inst.fx = res.fx;
    if (sort.kind == ForceSort::Kind::kByFeature) inst.sort_value = (*X_explain)(r, sort.feature);
    std::vector<double> magnitude(res.phi.size());
    for (std::size_t j = 0; j < res.phi.size(); ++j) magnitude[j] = std::abs(res.phi[j]);
    for (std::size_t j : TopFeatures(magnitude, magnitude.size())) {
      inst.contributions.emplace_back(j, res.phi[j]);
    }
    out.stack.push_back(std::move(inst));
  }
  std::stable_sort(out.stack.begin(), out.stack.end(),
                   [&](const ForceInstance& a, const ForceInstance& b) {
                     return sort.kind == ForceSort::Kind::kByOutput ? a.fx < b.fx
                                                                    : *a.sort_value < *b.sort_value;
                   });
  return out;
}

nlohmann::json ImportanceComparison::ToJson() const {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : rows) {
    table.push_back({{"feature", r.feature},
                     {"name", r.name},
                     {"gain", r.gain},
                     {"gain_rank", OptionalIndex(r.gain_rank)},
                     {"mean_abs_phi", r.mean_abs_phi},
                     {"shap_rank", OptionalIndex(r.shap_rank)}});
  }
  return {{"top_n", top_n},
          {"rows", table},
          {"jaccard", jaccard},
          {"spearman", spearman},
          {"gain_top_share", gain_top_share},
          {"shap_top_share_of_top5", shap_top_share_of_top5}};
}

void ImportanceComparison::WriteCsv(std::ostream& out) const {
  out << "feature,name,gain,gain_rank,mean_abs_phi,shap_rank\n";
  const auto rank = [](const std::optional<std::size_t>& v) {
    return v ? fmt::format("{}", *v) : std::string();
  };
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.feature, r.name, r.gain, rank(r.gain_rank),
                       r.mean_abs_phi, rank(r.shap_rank));
  }
}

ImportanceComparison CompareImportance(const std::vector<FeatureScore>& gain, const ShapMatrix& sm,
                                       std::size_t top_n) {
  const std::size_t d = sm.cols();
  std::vector<double> gain_by_feature(d, 0.0);
  for (const auto& g : gain) {
    if (g.feature >= d) throw Error(ErrorCode::kShapeMismatch, "gain refers to unknown feature");
    gain_by_feature[g.feature] += g.score;
  }
  const double gain_total = std::accumulate(gain_by_feature.begin(), gain_by_feature.end(), 0.0);
  if (gain_total > 0.0) {
    for (double& g : gain_by_feature) g /= gain_total;
  }
  const std::vector<double> mean_abs = sm.MeanAbsPhi();

  ImportanceComparison out;
  out.top_n = top_n;
  const auto gain_top = TopFeatures(gain_by_feature, top_n);
  const auto shap_top = TopFeatures(mean_abs, top_n);
  out.jaccard = Jaccard(gain_top, shap_top);

  std::vector<std::optional<std::size_t>> gain_rank(d), shap_rank(d);
  for (std::size_t i = 0; i < gain_top.size(); ++i) gain_rank[gain_top[i]] = i;
  for (std::size_t i = 0; i < shap_top.size(); ++i) shap_rank[shap_top[i]] = i;
  std::vector<double> union_gain, union_shap;
  for (std::size_t j = 0; j < d; ++j) {
    if (!gain_rank[j] && !shap_rank[j]) continue;
    out.rows.push_back({j, sm.feature_names[j], gain_by_feature[j], mean_abs[j], gain_rank[j],
                        shap_rank[j]});
    union_gain.push_back(gain_by_feature[j]);
    union_shap.push_back(mean_abs[j]);
  }
  out.spearman = union_gain.size() >= 2 ? Spearman(union_gain, union_shap) : 1.0;
  if (!std::isfinite(out.spearman)) out.spearman = 0.0;

  if (d > 0) out.gain_top_share = *std::max_element(gain_by_feature.begin(), gain_by_feature.end());
  const auto top5 = TopFeatures(mean_abs, 5);
  double top5_sum = 0.0;
  for (std::size_t j : top5) top5_sum += mean_abs[j];
  if (top5_sum > 0.0) out.shap_top_share_of_top5 = mean_abs[top5.front()] / top5_sum;
  return out;
}

std::string ArtifactName(std::string_view model, std::string_view explainer, std::string_view view,
                         std::string_view ext) {
  return fmt::format("{}_{}_{}.{}", model, explainer, view, ext);
}

}  // namespace credx
