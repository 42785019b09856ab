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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "credx/matrix.hpp"

namespace credx {

enum class ColumnKind { kNumeric, kCategorical, kTarget };

std::string_view ColumnKindName(ColumnKind kind);
ColumnKind ParseColumnKind(std::string_view name);

// One typed column. Numeric columns use `numeric`, categorical and target
// columns use `text`; `missing` flags cells that were empty or unparseable.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<double> numeric;
  std::vector<std::string> text;
  std::vector<std::uint8_t> missing;

  std::size_t size() const { return missing.size(); }
  std::size_t missing_count() const;
  bool is_missing(std::size_t r) const { return missing[r] != 0; }
};

// Column declarations in declaration order. Declaration order is what
// tie-breaking rules (correlation filter) refer to.
struct Schema {
  std::vector<std::pair<std::string, ColumnKind>> columns;
  std::string grade_column = "grade";

  static Schema FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
  std::string target_name() const;
};

Schema LoadSchema(const std::filesystem::path& path);

// Column-stored table. `target` stays empty until BinarizeTarget runs.
struct Dataset {
  std::vector<Column> columns;
  std::vector<int> target;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t target_index() const;
  std::size_t missing_cells() const;
};

// Accumulates what each preprocessing step did; serialized as the
// preprocessing report.
struct PreprocessReport {
  struct Dropped {
    std::string column;
    std::string reason;
  };
  struct CorrelatedPair {
    std::string kept;
    std::string dropped;
    double r = 0.0;
  };
  struct ChiSquareEntry {
    std::string column;
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    bool kept = false;
  };

  std::vector<Dropped> dropped;
  std::map<std::string, std::size_t> imputed;
  std::vector<CorrelatedPair> correlated;
  std::vector<ChiSquareEntry> chi_square;
  std::size_t rows_removed_by_target = 0;
  std::map<std::string, std::size_t> unseen_levels;
  std::vector<std::string> warnings;

  nlohmann::json ToJson() const;
};

Dataset ParseCsv(std::istream& in, const Schema& schema);
Dataset LoadCsv(const std::filesystem::path& path, const Schema& schema);
void WriteCsv(std::ostream& out, const Dataset& d);

// Removes feature columns whose missing fraction is strictly above
// `threshold`, then imputes what remains (median for numeric, mode for
// categorical). The target column is never dropped or imputed.
Dataset DropSparseColumns(const Dataset& d, double threshold = 0.9,
                          PreprocessReport* report = nullptr);

// Greedy pass over numeric column pairs in declaration order: when
// |r| > r_max the later column goes.
Dataset FilterCorrelated(const Dataset& d, double r_max = 0.9,
                         PreprocessReport* report = nullptr);

// Drops categorical features whose chi-square independence test against the
// binarized target has p >= alpha. Single-level features are dropped with a
// DegenerateTable warning.
Dataset FilterChiSquare(const Dataset& d, double alpha = 0.05,
                        PreprocessReport* report = nullptr);

// E, F, G -> D; A-D unchanged; anything else throws UnknownLevel.
std::string ClubGrade(std::string_view level);
Dataset ClubGrades(const Dataset& d, std::string_view grade_column = "grade");

// "Fully Paid" -> 0, "Default" / "Charged Off" -> 1, other rows removed.
Dataset BinarizeTarget(const Dataset& d, PreprocessReport* report = nullptr);

struct EncodedFeature {
  std::string source;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<std::string> levels;  // categorical only, sorted
  double fill = 0.0;                // numeric replay imputation value
};

struct EncoderMap {
  std::vector<EncodedFeature> features;
  std::string grade_column;
  std::map<std::string, std::string> grade_clubbing;

  std::vector<std::string> column_names() const;
  nlohmann::json ToJson() const;
  static EncoderMap FromJson(const nlohmann::json& j);
};

struct EncodedMatrix {
  std::vector<std::string> names;
  Matrix X;
  std::vector<int> y;
  // Index into encoder.features for every column of X.
  std::vector<std::size_t> group;
  EncoderMap encoder;

  std::size_t rows() const { return X.rows(); }
  std::size_t cols() const { return X.cols(); }
  EncodedMatrix select_rows(std::span<const std::size_t> indices) const;
};

EncodedMatrix OneHotEncode(const Dataset& d);

// Replays a fitted encoder on new data. Unseen categorical levels encode as
// an all-zero block and are counted in the report.
EncodedMatrix ApplyEncoder(const EncoderMap& map, const Dataset& d,
                           PreprocessReport* report = nullptr);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Stratified disjoint split; both halves keep ascending row order.
std::pair<EncodedMatrix, EncodedMatrix> TrainTestSplit(const EncodedMatrix& m,
                                                       const SplitSpec& spec);

void WriteEncodedCsv(std::ostream& out, const EncodedMatrix& m);
// Reads a file produced by WriteEncodedCsv; last column is the target.
EncodedMatrix ReadEncodedCsv(std::istream& in, const EncoderMap& encoder);

struct PrepOptions {
  double sparse_threshold = 0.9;
  double correlation_max = 0.9;
  double chi_square_alpha = 0.05;
};

// sparse drop -> target binarization -> grade clubbing -> correlation filter
// -> chi-square filter -> one-hot encoding.
EncodedMatrix Preprocess(const Dataset& raw, const Schema& schema,
                         const PrepOptions& options, PreprocessReport* report);

}  // namespace credx
