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
#include <span>
#include <vector>

#include "json.hpp"

#include "credx/matrix.hpp"
#include "credx/random.hpp"

namespace credx {

enum class BackgroundSource { kKMeans, kSample, kFull };

// Reference rows for interventional expectations. Weights are non-negative
// and sum to 1.
struct Background {
  Matrix rows;
  std::vector<double> weights;
  BackgroundSource provenance = BackgroundSource::kFull;
  std::size_t k = 0;
  std::size_t source_n = 0;

  static Background Full(const Matrix& X);
  // Uniform sample of n rows without replacement (all rows when n >= R).
  static Background Sample(const Matrix& X, std::size_t n, std::uint64_t seed);

  std::size_t size() const { return rows.rows(); }
  nlohmann::json ToJson() const;
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;
  int jobs = 1;
};

struct KMeansResult {
  Matrix centroids;
  std::vector<std::size_t> assignment;
  std::vector<std::size_t> sizes;
  std::size_t iterations = 0;
  std::size_t reseeded = 0;  // empty clusters moved to a far point
};

// Lloyd's algorithm with k-means++ seeding on the given rows. Converges when
// the summed squared centroid shift drops to tolerance times the mean feature
// variance, or assignments stop changing. An empty cluster is re-seeded at
// the point farthest from its current centroid.
KMeansResult KMeans(const Matrix& X, std::size_t k, Rng& rng, const KMeansOptions& options = {});

// Uniform sub-sample of `source_n` rows (capped at R), then k-means on
// standardized features; centroids are reported in the original units with
// weights proportional to cluster sizes.
Background SummarizeBackground(const Matrix& X_train, std::size_t k = 30,
                               std::size_t source_n = 20000, std::uint64_t seed = 0,
                               int jobs = 1);

}  // namespace credx
