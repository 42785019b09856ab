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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "credx/error.hpp"
#include "credx/kernels.hpp"
#include "credx/model.hpp"

namespace credx {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

std::string_view SourceName(BackgroundSource s) {
  switch (s) {
    case BackgroundSource::kKMeans: return "kmeans";
    case BackgroundSource::kSample: return "sample";
    case BackgroundSource::kFull: return "full";
  }
  return "full";
}

std::vector<std::size_t> SampleWithoutReplacement(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  m = std::min(m, n);
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + UniformIndex(rng, n - i)]);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Background Background::Full(const Matrix& X) {
  if (X.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "background needs rows");
  Background bg;
  bg.rows = X;
  bg.weights.assign(X.rows(), 1.0 / static_cast<double>(X.rows()));
  bg.provenance = BackgroundSource::kFull;
  bg.k = X.rows();
  bg.source_n = X.rows();
  return bg;
}

Background Background::Sample(const Matrix& X, std::size_t n, std::uint64_t seed) {
  if (X.rows() == 0 || n == 0) throw Error(ErrorCode::kInvalidArgument, "background needs rows");
  Rng rng(seed);
  const auto idx = SampleWithoutReplacement(X.rows(), n, rng);
  Background bg;
  bg.rows = X.select_rows(idx);
  bg.weights.assign(idx.size(), 1.0 / static_cast<double>(idx.size()));
  bg.provenance = BackgroundSource::kSample;
  bg.k = idx.size();
  bg.source_n = X.rows();
  return bg;
}

nlohmann::json Background::ToJson() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto row = rows.row(r);
    rows_json.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"provenance", SourceName(provenance)},
          {"k", k},
          {"source_n", source_n},
          {"weights", weights},
          {"rows", rows_json}};
}

KMeansResult KMeans(const Matrix& X, std::size_t k, Rng& rng, const KMeansOptions& options) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (n == 0 || k == 0) throw Error(ErrorCode::kInvalidArgument, "k-means needs rows and k > 0");
  k = std::min(k, n);

  // k-means++ seeding.
  KMeansResult res;
  res.centroids = Matrix(k, d);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = UniformIndex(rng, n);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(X.row(pick).begin(), d, res.centroids.row(c).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(X.row(i), res.centroids.row(c)));
      total += nearest[i];
    }
    if (c + 1 == k) break;
    if (total <= 0.0) {
      pick = UniformIndex(rng, n);
      continue;
    }
    double u = Uniform01(rng) * total;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      u -= nearest[i];
      if (u < 0.0) {
        pick = i;
        break;
      }
    }
  }

  double mean_variance = 0.0;
  for (std::size_t f = 0; f < d; ++f) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += X(i, f);
      ss += X(i, f) * X(i, f);
    }
    const double m = s / static_cast<double>(n);
    mean_variance += std::max(0.0, ss / static_cast<double>(n) - m * m);
  }
  mean_variance /= static_cast<double>(std::max<std::size_t>(d, 1));
  const double threshold = options.tolerance * mean_variance;

  res.assignment.assign(n, k);
  std::vector<std::size_t> next(n);
  Matrix sums(k, d);
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    if (options.jobs > 1) {
      kernels::AssignNearestParallel(X, res.centroids, next, options.jobs);
    } else {
      kernels::AssignNearestSerial(X, res.centroids, next);
    }
    const bool changed = next != res.assignment;
    res.assignment = next;

    sums = Matrix(k, d);
    res.sizes.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = res.assignment[i];
      ++res.sizes[c];
      const auto row = X.row(i);
      auto s = sums.row(c);
      for (std::size_t f = 0; f < d; ++f) s[f] += row[f];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      auto centroid = res.centroids.row(c);
      if (res.sizes[c] == 0) {
        // Move the empty centroid onto the point worst served by its cluster.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (res.sizes[res.assignment[i]] <= 1) continue;
          const double dist = SquaredDistance(X.row(i), res.centroids.row(res.assignment[i]));
          if (dist > far_d) {
            far_d = dist;
            far = i;
          }
        }
        if (far_d < 0.0) continue;
        shift += SquaredDistance(centroid, X.row(far));
        std::copy_n(X.row(far).begin(), d, centroid.begin());
        --res.sizes[res.assignment[far]];
        res.assignment[far] = c;
        res.sizes[c] = 1;
        ++res.reseeded;
        continue;
      }
      const auto s = sums.row(c);
      for (std::size_t f = 0; f < d; ++f) {
        const double updated = s[f] / static_cast<double>(res.sizes[c]);
        shift += (updated - centroid[f]) * (updated - centroid[f]);
        centroid[f] = updated;
      }
    }
    if (!changed || shift <= threshold) {
      ++res.iterations;
      break;
    }
  }
  // Final sizes consistent with the final assignment.
  res.sizes.assign(k, 0);
  for (std::size_t c : res.assignment) ++res.sizes[c];
  return res;
}

Background SummarizeBackground(const Matrix& X_train, std::size_t k, std::size_t source_n,
                               std::uint64_t seed, int jobs) {
  if (X_train.rows() == 0 || k == 0 || source_n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "background summarization needs rows and k > 0");
  }
  Rng rng(seed);
  const auto idx = SampleWithoutReplacement(X_train.rows(), source_n, rng);
  const Matrix subset = X_train.select_rows(idx);
  const Standardizer scaler = Standardizer::Fit(subset);
  KMeansOptions options;
  options.jobs = jobs;
  const KMeansResult km = KMeans(scaler.Apply(subset), k, rng, options);

  const std::size_t kk = km.centroids.rows();
  Background bg;
  bg.rows = Matrix(kk, X_train.cols());
  std::vector<double> count(kk, 0.0);
  for (std::size_t i = 0; i < subset.rows(); ++i) {
    const std::size_t c = km.assignment[i];
    count[c] += 1.0;
    auto dst = bg.rows.row(c);
    const auto src = subset.row(i);
    for (std::size_t f = 0; f < src.size(); ++f) dst[f] += src[f];
  }
  // Centroids are member means in original units; drop clusters that ended
  // up empty.
  std::vector<std::size_t> live;
  for (std::size_t c = 0; c < kk; ++c) {
    if (count[c] == 0.0) continue;
    for (double& v : bg.rows.row(c)) v /= count[c];
    live.push_back(c);
  }
  bg.rows = bg.rows.select_rows(live);
  const auto total = static_cast<double>(subset.rows());
  for (std::size_t c : live) bg.weights.push_back(count[c] / total);
  bg.provenance = BackgroundSource::kKMeans;
  bg.k = live.size();
  bg.source_n = subset.rows();
  return bg;
}

}  // namespace credx
