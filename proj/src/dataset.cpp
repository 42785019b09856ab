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

#include "credx/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "credx/error.hpp"
#include "credx/random.hpp"
#include "credx/stats.hpp"

namespace credx {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> ParseNumber(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Column EmptyLike(const Column& c) {
  Column out;
  out.name = c.name;
  out.kind = c.kind;
  return out;
}

void PushCell(Column& dst, const Column& src, std::size_t r) {
  if (dst.kind == ColumnKind::kNumeric) {
    dst.numeric.push_back(src.numeric[r]);
  } else {
    dst.text.push_back(src.text[r]);
  }
  dst.missing.push_back(src.missing[r]);
}

Dataset KeepColumns(const Dataset& d, const std::vector<bool>& keep) {
  Dataset out;
  out.target = d.target;
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    if (keep[c]) out.columns.push_back(d.columns[c]);
  }
  return out;
}

void Warn(PreprocessReport* report, std::string message) {
  if (report) report->warnings.push_back(std::move(message));
}

}  // namespace

std::string_view ColumnKindName(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kTarget: return "target";
  }
  return "numeric";
}

ColumnKind ParseColumnKind(std::string_view name) {
  if (name == "numeric") return ColumnKind::kNumeric;
  if (name == "categorical") return ColumnKind::kCategorical;
  if (name == "target") return ColumnKind::kTarget;
  throw Error(ErrorCode::kFormat, fmt::format("unknown column kind '{}'", name));
}

std::size_t Column::missing_count() const {
  return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), 1));
}

Schema Schema::FromJson(const nlohmann::json& j) {
  Schema s;
  for (const auto& c : j.at("columns")) {
    s.columns.emplace_back(c.at("name").get<std::string>(),
                           ParseColumnKind(c.at("kind").get<std::string>()));
  }
  if (j.contains("grade_column")) s.grade_column = j["grade_column"].get<std::string>();
  const auto targets = std::count_if(s.columns.begin(), s.columns.end(), [](const auto& c) {
    return c.second == ColumnKind::kTarget;
  });
  if (targets != 1) {
    throw Error(ErrorCode::kFormat, "schema must declare exactly one target column");
  }
  return s;
}

nlohmann::json Schema::ToJson() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& [name, kind] : columns) {
    cols.push_back({{"name", name}, {"kind", ColumnKindName(kind)}});
  }
  return {{"columns", cols}, {"grade_column", grade_column}};
}

std::string Schema::target_name() const {
  for (const auto& [name, kind] : columns) {
    if (kind == ColumnKind::kTarget) return name;
  }
  throw Error(ErrorCode::kFormat, "schema has no target column");
}

Schema LoadSchema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open schema " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, fmt::format("schema {}: {}", path.string(), e.what()));
  }
  return Schema::FromJson(j);
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].name == name) return c;
  }
  return std::nullopt;
}

std::size_t Dataset::target_index() const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].kind == ColumnKind::kTarget) return c;
  }
  throw Error(ErrorCode::kMissingColumn, "dataset has no target column");
}

std::size_t Dataset::missing_cells() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.missing_count();
  return n;
}

nlohmann::json PreprocessReport::ToJson() const {
  nlohmann::json j;
  j["dropped"] = nlohmann::json::array();
  for (const auto& d : dropped) j["dropped"].push_back({{"column", d.column}, {"reason", d.reason}});
  j["imputed"] = imputed;
  j["correlated"] = nlohmann::json::array();
  for (const auto& c : correlated) {
    j["correlated"].push_back({{"kept", c.kept}, {"dropped", c.dropped}, {"r", c.r}});
  }
  j["chi_square"] = nlohmann::json::array();
  for (const auto& c : chi_square) {
    j["chi_square"].push_back({{"column", c.column},
                               {"statistic", c.statistic},
                               {"df", c.df},
                               {"p_value", c.p_value},
                               {"kept", c.kept}});
  }
  j["rows_removed_by_target"] = rows_removed_by_target;
  j["unseen_levels"] = unseen_levels;
  j["warnings"] = warnings;
  return j;
}

Dataset ParseCsv(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormat, "CSV has no header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = SplitCsvLine(line);
  for (auto& h : header) h = Trim(h);

  Dataset d;
  std::vector<std::size_t> source;
  for (const auto& [name, kind] : schema.columns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::kMissingColumn, fmt::format("CSV lacks declared column '{}'", name));
    }
    source.push_back(static_cast<std::size_t>(it - header.begin()));
    Column c;
    c.name = name;
    c.kind = kind;
    d.columns.push_back(std::move(c));
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kRowWidthMismatch,
                  fmt::format("line {}: {} fields, header has {}", line_no, fields.size(),
                              header.size()));
    }
    for (std::size_t c = 0; c < d.columns.size(); ++c) {
      Column& col = d.columns[c];
      const std::string cell = Trim(fields[source[c]]);
      if (col.kind == ColumnKind::kNumeric) {
        const auto v = ParseNumber(cell);
        col.numeric.push_back(v.value_or(0.0));
        col.missing.push_back(v ? 0 : 1);
      } else {
        col.text.push_back(cell);
        col.missing.push_back(cell.empty() ? 1 : 0);
      }
    }
  }
  return d;
}

Dataset LoadCsv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ParseCsv(in, schema);
}

void WriteCsv(std::ostream& out, const Dataset& d) {
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    out << (c ? "," : "") << CsvEscape(d.columns[c].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.columns.size(); ++c) {
      if (c) out << ',';
      const Column& col = d.columns[c];
      if (col.is_missing(r)) continue;
      if (col.kind == ColumnKind::kNumeric) {
        out << fmt::format("{}", col.numeric[r]);
      } else {
        out << CsvEscape(col.text[r]);
      }
    }
    out << '\n';
  }
}

Dataset DropSparseColumns(const Dataset& d, double threshold, PreprocessReport* report) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sparse threshold must lie in (0, 1]");
  }
  const std::size_t rows = d.rows();
  std::vector<bool> keep(d.columns.size(), true);
  std::size_t surviving_features = 0;
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    const Column& col = d.columns[c];
    if (col.kind == ColumnKind::kTarget) continue;
    const double fraction =
        rows == 0 ? 0.0 : static_cast<double>(col.missing_count()) / static_cast<double>(rows);
    if (fraction > threshold) {
      keep[c] = false;
      if (report) {
        report->dropped.push_back(
            {col.name, fmt::format("missing fraction {:.4f} > {}", fraction, threshold)});
      }
    } else {
      ++surviving_features;
    }
  }
  if (surviving_features == 0) {
    throw Error(ErrorCode::kAllColumnsDropped, "no feature column survives the sparse filter");
  }

  Dataset out = KeepColumns(d, keep);
  for (Column& col : out.columns) {
    if (col.kind == ColumnKind::kTarget) continue;
    const std::size_t n_missing = col.missing_count();
    if (n_missing == 0) continue;
    if (col.kind == ColumnKind::kNumeric) {
      std::vector<double> present;
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (!col.is_missing(r)) present.push_back(col.numeric[r]);
      }
      const double fill = present.empty() ? 0.0 : Median(std::move(present));
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (col.is_missing(r)) col.numeric[r] = fill;
      }
    } else {
      std::map<std::string, std::size_t> counts;
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (!col.is_missing(r)) ++counts[col.text[r]];
      }
      std::string fill = "NA";
      std::size_t best = 0;
      for (const auto& [level, n] : counts) {
        if (n > best) {
          best = n;
          fill = level;
        }
      }
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (col.is_missing(r)) col.text[r] = fill;
      }
    }
    std::fill(col.missing.begin(), col.missing.end(), 0);
    if (report) report->imputed[col.name] = n_missing;
  }
  return out;
}

Dataset FilterCorrelated(const Dataset& d, double r_max, PreprocessReport* report) {
  std::vector<std::size_t> numeric;
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    if (d.columns[c].kind == ColumnKind::kNumeric) numeric.push_back(c);
  }
  std::vector<bool> keep(d.columns.size(), true);
  for (std::size_t a = 0; a < numeric.size(); ++a) {
    if (!keep[numeric[a]]) continue;
    for (std::size_t b = a + 1; b < numeric.size(); ++b) {
      if (!keep[numeric[b]]) continue;
      const Column& ca = d.columns[numeric[a]];
      const Column& cb = d.columns[numeric[b]];
      const double r = Pearson(ca.numeric, cb.numeric);
      if (std::isfinite(r) && std::abs(r) > r_max) {
        keep[numeric[b]] = false;
        if (report) {
          report->correlated.push_back({ca.name, cb.name, r});
          report->dropped.push_back({cb.name, fmt::format("|r| = {:.4f} with {}", std::abs(r), ca.name)});
        }
      }
    }
  }
  return KeepColumns(d, keep);
}

Dataset FilterChiSquare(const Dataset& d, double alpha, PreprocessReport* report) {
  if (d.target.size() != d.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "chi-square filter needs a binarized target");
  }
  std::vector<bool> keep(d.columns.size(), true);
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    const Column& col = d.columns[c];
    if (col.kind != ColumnKind::kCategorical) continue;
    std::map<std::string, std::size_t> level_index;
    for (const auto& t : col.text) level_index.emplace(t, 0);
    if (level_index.size() < 2) {
      keep[c] = false;
      Warn(report, fmt::format("DegenerateTable: '{}' has a single level", col.name));
      if (report) report->dropped.push_back({col.name, "DegenerateTable: single level"});
      continue;
    }
    std::size_t i = 0;
    for (auto& [level, idx] : level_index) idx = i++;
    std::vector<std::vector<double>> table(level_index.size(), std::vector<double>(2, 0.0));
    for (std::size_t r = 0; r < col.size(); ++r) {
      table[level_index[col.text[r]]][static_cast<std::size_t>(d.target[r])] += 1.0;
    }
    const ChiSquareResult test = ChiSquareTest(table);
    const bool kept = test.p_value < alpha;
    keep[c] = kept;
    if (report) {
      report->chi_square.push_back({col.name, test.statistic, test.df, test.p_value, kept});
      if (!kept) {
        report->dropped.push_back(
            {col.name, fmt::format("chi-square p = {:.4g} >= {}", test.p_value, alpha)});
      }
    }
  }
  return KeepColumns(d, keep);
}

std::string ClubGrade(std::string_view level) {
  if (level.size() == 1 && level[0] >= 'A' && level[0] <= 'G') {
    return level[0] >= 'E' ? "D" : std::string(level);
  }
  throw Error(ErrorCode::kUnknownLevel, fmt::format("grade level '{}' outside A-G", level));
}

Dataset ClubGrades(const Dataset& d, std::string_view grade_column) {
  const auto idx = d.index_of(grade_column);
  if (!idx || d.columns[*idx].kind != ColumnKind::kCategorical) {
    throw Error(ErrorCode::kMissingColumn,
                fmt::format("no categorical grade column '{}'", grade_column));
  }
  Dataset out = d;
  for (auto& level : out.columns[*idx].text) level = ClubGrade(level);
  return out;
}

Dataset BinarizeTarget(const Dataset& d, PreprocessReport* report) {
  const std::size_t t = d.target_index();
  const Column& status = d.columns[t];
  std::vector<std::size_t> kept_rows;
  std::vector<int> labels;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const std::string& s = status.text[r];
    if (s == "Fully Paid") {
      kept_rows.push_back(r);
      labels.push_back(0);
    } else if (s == "Default" || s == "Charged Off") {
      kept_rows.push_back(r);
      labels.push_back(1);
    }
  }
  if (kept_rows.empty()) {
    throw Error(ErrorCode::kEmptyAfterFilter, "no rows with a Fully Paid / Default status");
  }
  Dataset out;
  for (const Column& c : d.columns) {
    Column nc = EmptyLike(c);
    for (std::size_t r : kept_rows) PushCell(nc, c, r);
    out.columns.push_back(std::move(nc));
  }
  out.target = std::move(labels);
  if (report) report->rows_removed_by_target = d.rows() - kept_rows.size();
  return out;
}

std::vector<std::string> EncoderMap::column_names() const {
  std::vector<std::string> names;
  for (const auto& f : features) {
    if (f.kind == ColumnKind::kNumeric) {
      names.push_back(f.source);
    } else {
      for (const auto& level : f.levels) names.push_back(f.source + "=" + level);
    }
  }
  return names;
}

nlohmann::json EncoderMap::ToJson() const {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : features) {
    nlohmann::json j{{"source", f.source}, {"kind", ColumnKindName(f.kind)}};
    if (f.kind == ColumnKind::kCategorical) {
      j["levels"] = f.levels;
    } else {
      j["fill"] = f.fill;
    }
    feats.push_back(std::move(j));
  }
  return {{"features", feats}, {"grade_column", grade_column}, {"grade_clubbing", grade_clubbing}};
}

EncoderMap EncoderMap::FromJson(const nlohmann::json& j) {
  EncoderMap m;
  for (const auto& fj : j.at("features")) {
    EncodedFeature f;
    f.source = fj.at("source").get<std::string>();
    f.kind = ParseColumnKind(fj.at("kind").get<std::string>());
    if (f.kind == ColumnKind::kCategorical) {
      f.levels = fj.at("levels").get<std::vector<std::string>>();
    } else {
      f.fill = fj.value("fill", 0.0);
    }
    m.features.push_back(std::move(f));
  }
  m.grade_column = j.value("grade_column", std::string());
  if (j.contains("grade_clubbing")) {
    m.grade_clubbing = j["grade_clubbing"].get<std::map<std::string, std::string>>();
  }
  return m;
}

EncodedMatrix EncodedMatrix::select_rows(std::span<const std::size_t> indices) const {
  EncodedMatrix out;
  out.names = names;
  out.group = group;
  out.encoder = encoder;
  out.X = X.select_rows(indices);
  out.y.reserve(indices.size());
  for (std::size_t i : indices) out.y.push_back(y[i]);
  return out;
}

EncodedMatrix OneHotEncode(const Dataset& d) {
  EncoderMap map;
  for (const Column& c : d.columns) {
    if (c.kind == ColumnKind::kTarget) continue;
    EncodedFeature f;
    f.source = c.name;
    f.kind = c.kind;
    if (c.kind == ColumnKind::kCategorical) {
      const std::set<std::string> levels(c.text.begin(), c.text.end());
      f.levels.assign(levels.begin(), levels.end());
    } else {
      std::vector<double> present;
      for (std::size_t r = 0; r < c.size(); ++r) {
        if (!c.is_missing(r)) present.push_back(c.numeric[r]);
      }
      f.fill = present.empty() ? 0.0 : Median(std::move(present));
    }
    map.features.push_back(std::move(f));
  }
  return ApplyEncoder(map, d, nullptr);
}

EncodedMatrix ApplyEncoder(const EncoderMap& map, const Dataset& d, PreprocessReport* report) {
  EncodedMatrix m;
  m.encoder = map;
  m.names = map.column_names();
  m.X = Matrix(d.rows(), m.names.size());
  m.y = d.target;
  std::size_t col = 0;
  for (std::size_t fi = 0; fi < map.features.size(); ++fi) {
    const EncodedFeature& f = map.features[fi];
    const auto idx = d.index_of(f.source);
    if (!idx) throw Error(ErrorCode::kMissingColumn, "encoder column missing: " + f.source);
    const Column& c = d.columns[*idx];
    if (f.kind == ColumnKind::kNumeric) {
      for (std::size_t r = 0; r < d.rows(); ++r) {
        m.X(r, col) = c.is_missing(r) ? f.fill : c.numeric[r];
      }
      m.group.push_back(fi);
      ++col;
      continue;
    }
    const bool club = f.source == map.grade_column && !map.grade_clubbing.empty();
    for (std::size_t r = 0; r < d.rows(); ++r) {
      std::string_view level = c.text[r];
      if (club) {
        const auto m_it = map.grade_clubbing.find(c.text[r]);
        if (m_it != map.grade_clubbing.end()) level = m_it->second;
      }
      const auto it = std::lower_bound(f.levels.begin(), f.levels.end(), level);
      if (it != f.levels.end() && *it == level) {
        m.X(r, col + static_cast<std::size_t>(it - f.levels.begin())) = 1.0;
      } else if (report) {
        ++report->unseen_levels[f.source];
      }
    }
    for (std::size_t k = 0; k < f.levels.size(); ++k) m.group.push_back(fi);
    col += f.levels.size();
  }
  if (report) {
    for (const auto& [source, n] : report->unseen_levels) {
      Warn(report, fmt::format("UnseenLevel: {} rows of '{}' encoded as all zeros", n, source));
    }
  }
  return m;
}

std::pair<EncodedMatrix, EncodedMatrix> TrainTestSplit(const EncodedMatrix& m,
                                                       const SplitSpec& spec) {
  const std::size_t n = m.rows();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "split needs at least two rows");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test_fraction must lie in (0, 1)");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t r = 0; r < n; ++r) by_class[static_cast<std::size_t>(m.y[r] != 0)].push_back(r);

  const auto total_test =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
  // Largest-remainder apportionment; with two classes at most one row is
  // left over after flooring.
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double exact = static_cast<double>(by_class[k].size()) *
                         static_cast<double>(total_test) / static_cast<double>(n);
    take[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - std::floor(exact);
    assigned += take[k];
  }
  if (assigned < total_test) ++take[remainder[1] > remainder[0] ? 1 : 0];

  Rng rng(spec.seed);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t k = 0; k < 2; ++k) {
    auto rows = by_class[k];
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[UniformIndex(rng, i)]);
    }
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<long>(take[k]));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<long>(take[k]), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  auto train = m.select_rows(train_rows);
  auto test = m.select_rows(test_rows);
  for (const auto* part : {&train, &test}) {
    const auto pos = std::count(part->y.begin(), part->y.end(), 1);
    if (pos == 0 || pos == static_cast<long>(part->y.size())) {
      throw Error(ErrorCode::kClassAbsent, "a split lost one class entirely");
    }
  }
  return {std::move(train), std::move(test)};
}

void WriteEncodedCsv(std::ostream& out, const EncodedMatrix& m) {
  for (const auto& name : m.names) out << CsvEscape(name) << ',';
  out << "target\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << fmt::format("{}", m.X(r, c)) << ',';
    out << m.y[r] << '\n';
  }
}

EncodedMatrix ReadEncodedCsv(std::istream& in, const EncoderMap& encoder) {
  EncodedMatrix m;
  m.encoder = encoder;
  m.names = encoder.column_names();
  for (std::size_t fi = 0; fi < encoder.features.size(); ++fi) {
    const auto& f = encoder.features[fi];
    const std::size_t width = f.kind == ColumnKind::kNumeric ? 1 : f.levels.size();
    for (std::size_t k = 0; k < width; ++k) m.group.push_back(fi);
  }
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFormat, "encoded CSV lacks header");
  auto header = SplitCsvLine(line);
  if (header.size() != m.names.size() + 1 ||
      !std::equal(m.names.begin(), m.names.end(), header.begin())) {
    throw Error(ErrorCode::kShapeMismatch, "encoded CSV header does not match encoder");
  }
  m.X = Matrix(0, m.names.size());
  std::vector<double> row(m.names.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kRowWidthMismatch, "encoded CSV row width mismatch");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto v = ParseNumber(fields[c]);
      if (!v) throw Error(ErrorCode::kFormat, "non-numeric cell in encoded CSV");
      row[c] = *v;
    }
    m.X.append_row(row);
    m.y.push_back(fields.back() == "1" ? 1 : 0);
  }
  return m;
}

EncodedMatrix Preprocess(const Dataset& raw, const Schema& schema, const PrepOptions& options,
                         PreprocessReport* report) {
  Dataset d = DropSparseColumns(raw, options.sparse_threshold, report);
  d = BinarizeTarget(d, report);
  std::map<std::string, std::string> clubbing;
  if (d.index_of(schema.grade_column)) {
    d = ClubGrades(d, schema.grade_column);
    for (char g = 'A'; g <= 'G'; ++g) {
      const std::string level(1, g);
      clubbing[level] = ClubGrade(level);
    }
  }
  d = FilterCorrelated(d, options.correlation_max, report);
  d = FilterChiSquare(d, options.chi_square_alpha, report);
  EncodedMatrix m = OneHotEncode(d);
  if (!clubbing.empty()) {
    m.encoder.grade_column = schema.grade_column;
    m.encoder.grade_clubbing = std::move(clubbing);
  }
  return m;
}

}  // namespace credx
