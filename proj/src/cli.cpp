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

#include "credx/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "credx/ale.hpp"
#include "credx/background.hpp"
#include "credx/dataset.hpp"
#include "credx/error.hpp"
#include "credx/export.hpp"
#include "credx/kernels.hpp"
#include "credx/lime.hpp"
#include "credx/metrics.hpp"
#include "credx/model.hpp"
#include "credx/random.hpp"
#include "credx/shap.hpp"
#include "credx/synthetic.hpp"

#ifndef CREDX_VERSION
#define CREDX_VERSION "dev"
#endif

namespace credx::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad flags, values or config keys; maps to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Streams derived from the master seed, one per pipeline stage.
enum SeedStream : std::uint64_t {
  kSplitStream = 1,
  kTrainStream = 2,
  kBackgroundStream = 3,
  kExplainRowsStream = 4,
  kShapStream = 5,
  kLimeStream = 6,
  kSmallBatchStream = 7,
};

const std::map<std::string, std::vector<std::string>>& EnumKeys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"synth.preset", {"default", "dominant"}},
      {"model.kind", {"logistic", "forest", "boosted", "svm", "mlp"}},
      {"svm.probability", {"platt", "raw"}},
      {"eval.split", {"train", "test"}},
      {"lime.discretizer", {"quartile", "none"}},
      {"shap.background", {"kmeans", "sample", "full"}},
      {"report.explainer", {"shap", "exact"}},
  };
  return keys;
}

// Resolved configuration: defaults, then the config file, then flags.
class RunConfig {
 public:
  RunConfig() : values_(ConfigDefaults()) {}

  void Set(const std::string& key, json value) {
    const auto it = ConfigDefaults().find(key);
    if (it == ConfigDefaults().end()) throw UsageError(fmt::format("unknown config key '{}'", key));
    values_[key] = Coerce(key, *it, std::move(value));
    explicit_.insert(key);
  }

  // Parses a flag's text according to the key's default type.
  void SetFromText(const std::string& key, const std::string& text) {
    const json& def = ConfigDefaults().at(key);
    try {
      std::size_t used = 0;
      if (def.is_boolean()) {
        if (text == "true" || text == "1") return Set(key, true);
        if (text == "false" || text == "0") return Set(key, false);
        throw UsageError("expected true or false");
      }
      if (def.is_number_integer()) {
        const long long v = std::stoll(text, &used);
        if (used != text.size() || v < 0) throw UsageError("expected a non-negative integer");
        return Set(key, v);
      }
      if (def.is_number_float()) {
        const double v = std::stod(text, &used);
        if (used != text.size()) throw UsageError("expected a number");
        return Set(key, v);
      }
      Set(key, text);
    } catch (const std::logic_error&) {
      throw UsageError(fmt::format("invalid value '{}' for {}", text, key));
    } catch (const UsageError& e) {
      throw UsageError(fmt::format("invalid value '{}' for {}: {}", text, key, e.what()));
    }
  }

  void LoadFile(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot read config file {}", path.string()));
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(fmt::format("config file {} is not valid JSON: {}", path.string(), e.what()));
    }
    if (!j.is_object()) throw UsageError("config file must be a flat JSON object");
    for (auto& [key, value] : j.items()) Set(key, value);
  }

  bool IsExplicit(const std::string& key) const { return explicit_.contains(key); }
  const json& values() const { return values_; }

  std::string Str(const std::string& key) const { return values_.at(key).get<std::string>(); }
  double Num(const std::string& key) const { return values_.at(key).get<double>(); }
  std::size_t Count(const std::string& key) const { return values_.at(key).get<std::size_t>(); }
  bool Flag(const std::string& key) const { return values_.at(key).get<bool>(); }
  std::uint64_t Seed() const { return values_.at("seed").get<std::uint64_t>(); }
  int Jobs() const { return std::max(1, values_.at("jobs").get<int>()); }

 private:
  static json Coerce(const std::string& key, const json& def, json value) {
    const auto bad = [&] {
      return UsageError(fmt::format("config key '{}' expects a {}", key, def.type_name()));
    };
    if (def.is_boolean() && !value.is_boolean()) throw bad();
    if (def.is_number_integer()) {
      if (!value.is_number_integer() || value.get<long long>() < 0) throw bad();
    }
    if (def.is_number_float()) {
      if (!value.is_number()) throw bad();
      value = value.get<double>();
    }
    if (def.is_string()) {
      if (!value.is_string()) throw bad();
      const auto it = EnumKeys().find(key);
      if (it != EnumKeys().end() &&
          std::find(it->second.begin(), it->second.end(), value.get<std::string>()) ==
              it->second.end()) {
        throw UsageError(fmt::format("'{}' is not a valid value for {}", value.get<std::string>(), key));
      }
    }
    return value;
  }

  json values_;
  std::set<std::string> explicit_;
};

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing {}", path.string()));
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ReadJson(const fs::path& path) {
  try {
    return json::parse(ReadText(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, fmt::format("{} is not valid JSON: {}", path.string(), e.what()));
  }
}

std::string Sanitize(std::string_view name) {
  std::string out;
  for (char c : name) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ? c : '-');
  }
  return out;
}

// Records every input and output of a run for the manifest.
class Context {
 public:
  Context(std::string command, RunConfig config, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), config_(std::move(config)), out_(out), err_(err) {
    std::string root = config_.Str("root");
    if (root.empty()) {
      const char* env = std::getenv(kArtifactRootEnv);
      root = env != nullptr && *env != '\0' ? env : "credx_artifacts";
    }
    root_ = root;
  }

  const RunConfig& config() const { return config_; }
  const fs::path& root() const { return root_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  fs::path Explanations() const { return root_ / "explanations"; }
  fs::path Reports() const { return root_ / "reports"; }

  void Input(const fs::path& p) { inputs_.push_back(p); }
  void Output(const fs::path& p, const std::string& text) {
    WriteText(p, text);
    outputs_.push_back(p);
  }
  void OutputJson(const fs::path& p, const json& j) { Output(p, j.dump(1) + "\n"); }
  template <typename T>
  void OutputCsv(const fs::path& p, const T& item) {
    std::ostringstream ss;
    item.WriteCsv(ss);
    Output(p, ss.str());
  }

  json State() const {
    const fs::path p = root_ / "state.json";
    if (!fs::exists(p)) return json::object();
    return ReadJson(p);
  }
  void UpdateState(const json& patch) {
    json state = State();
    state.update(patch);
    WriteText(root_ / "state.json", state.dump(1) + "\n");
  }

  void WriteManifest(double seconds) const {
    const std::string config_text = config_.values().dump();
    json inputs = json::array(), outputs = json::array();
    for (const auto& p : inputs_) inputs.push_back({{"path", p.string()}, {"fnv1a", HashFile(p)}});
    for (const auto& p : outputs_) outputs.push_back({{"path", p.string()}, {"fnv1a", HashFile(p)}});
    const json manifest = {
        {"schema_version", kManifestSchemaVersion},
        {"command", command_},
        {"config", config_.values()},
        {"config_hash", Fnv1aHex(config_text)},
        {"inputs", inputs},
        {"outputs", outputs},
        {"versions", {{"credx", CREDX_VERSION}, {"compiler", __VERSION__}}},
        {"timings", {{"total_seconds", seconds}}},
    };
    WriteText(root_ / "manifests" / (command_ + ".json"), manifest.dump(1) + "\n");
  }

 private:
  std::string command_;
  RunConfig config_;
  std::ostream& out_;
  std::ostream& err_;
  fs::path root_;
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
};

// ---------------------------------------------------------------------------
// Shared loading

struct Splits {
  EncoderMap encoder;
  EncodedMatrix train;
  EncodedMatrix test;
};

fs::path EncodedDir(const Context& ctx) {
  const std::string data = ctx.config().Str("data");
  if (!data.empty()) return data;
  const json state = ctx.State();
  if (state.contains("encoded_dir")) return state["encoded_dir"].get<std::string>();
  return ctx.root() / "encoded";
}

Splits LoadSplits(Context& ctx) {
  const fs::path dir = EncodedDir(ctx);
  Splits s;
  const fs::path enc = dir / "encoder.json";
  s.encoder = EncoderMap::FromJson(ReadJson(enc));
  ctx.Input(enc);
  for (auto [name, target] : {std::pair{"train.csv", &s.train}, std::pair{"test.csv", &s.test}}) {
    const fs::path p = dir / name;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read {}; run prep first", p.string()));
    *target = ReadEncodedCsv(in, s.encoder);
    ctx.Input(p);
  }
  return s;
}

fs::path ModelPath(const Context& ctx) {
  const RunConfig& cfg = ctx.config();
  if (!cfg.Str("model.path").empty()) return cfg.Str("model.path");
  if (!cfg.IsExplicit("model.kind")) {
    const json state = ctx.State();
    if (state.contains("model_path")) return state["model_path"].get<std::string>();
  }
  return ctx.root() / "models" / (cfg.Str("model.kind") + ".json");
}

std::unique_ptr<ProbabilityModel> LoadModelFor(Context& ctx) {
  const fs::path p = ModelPath(ctx);
  if (!fs::exists(p)) {
    throw Error(ErrorCode::kIo, fmt::format("model {} not found; run train first", p.string()));
  }
  auto model = LoadModel(p);
  ctx.Input(p);
  return model;
}

std::string KindName(const ProbabilityModel& m) { return std::string(ModelKindName(m.kind())); }

void CheckColumns(const ProbabilityModel& model, const EncodedMatrix& data) {
  if (model.feature_names() != data.names) {
    throw Error(ErrorCode::kShapeMismatch, "model features differ from the encoded data columns");
  }
}

// Seeded sample of up to n row indices, ascending.
std::vector<std::size_t> SampleRows(std::size_t total, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  n = std::min(n, total);
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + UniformIndex(rng, total - i)]);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Background MakeBackground(const Context& ctx, const Matrix& X_train) {
  const RunConfig& cfg = ctx.config();
  const std::string kind = cfg.Str("shap.background");
  const std::uint64_t seed = DeriveSeed(cfg.Seed(), kBackgroundStream);
  if (kind == "full") return Background::Full(X_train);
  if (kind == "sample") return Background::Sample(X_train, cfg.Count("shap.background_k"), seed);
  return SummarizeBackground(X_train, cfg.Count("shap.background_k"),
                             cfg.Count("shap.background_source_n"), seed, cfg.Jobs());
}

ShapConfig MakeShapConfig(const RunConfig& cfg) {
  ShapConfig sc;
  if (cfg.Count("shap.coalitions") > 0) sc.n_coalitions = cfg.Count("shap.coalitions");
  sc.exhaustive = cfg.Flag("shap.exhaustive");
  sc.seed = DeriveSeed(cfg.Seed(), kShapStream);
  return sc;
}

ShapProgress ProgressPrinter(std::ostream& err, std::string label) {
  return [&err, label](std::size_t done, std::size_t total) {
    const std::size_t step = std::max<std::size_t>(1, total / 10);
    if (done % step == 0 || done == total) err << fmt::format("{}: {}/{}\n", label, done, total);
  };
}

json RowsJson(const std::vector<std::size_t>& rows, const EncodedMatrix& data) {
  json X = json::array();
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto row = data.X.row(r);
    X.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"source", "test"}, {"row_index", rows}, {"names", data.names}, {"X", X}};
}

std::string RowsCsv(const std::vector<std::size_t>& rows, const EncodedMatrix& data) {
  std::string out = "row_index";
  for (const auto& n : data.names) out += "," + n;
  out += "\n";
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out += fmt::format("{}", rows[r]);
    for (double v : data.X.row(r)) out += fmt::format(",{}", v);
    out += "\n";
  }
  return out;
}

Matrix MatrixFromJson(const json& rows, std::size_t cols) {
  Matrix X(0, cols);
  for (const auto& r : rows) {
    const auto v = r.get<std::vector<double>>();
    if (v.size() != cols) throw Error(ErrorCode::kShapeMismatch, "stored row width differs");
    X.append_row(v);
  }
  return X;
}

std::size_t ResolveFeature(const std::vector<std::string>& names, const std::string& key) {
  const auto it = std::find(names.begin(), names.end(), key);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  if (!key.empty() && std::all_of(key.begin(), key.end(), ::isdigit)) {
    const std::size_t j = std::stoul(key);
    if (j < names.size()) return j;
  }
  throw UsageError(fmt::format("unknown feature '{}'", key));
}

// ---------------------------------------------------------------------------
// Subcommands

void RunSynth(Context& ctx) {
  const RunConfig& cfg = ctx.config();
  const SyntheticConfig sc =
      cfg.Str("synth.preset") == "dominant" ? SyntheticConfig::DominantDriver() : SyntheticConfig{};
  const std::size_t rows = cfg.Count("synth.rows");
  if (rows < 100) throw UsageError("--rows must be at least 100");
  const Dataset d = GenerateSynthetic(rows, cfg.Seed(), sc);
  const fs::path out = cfg.Str("synth.out");
  std::ostringstream csv;
  WriteCsv(csv, d);
  ctx.Output(out, csv.str());
  fs::path schema = out, truth = out;
  schema.replace_extension(".schema.json");
  truth.replace_extension(".truth.json");
  ctx.OutputJson(schema, SyntheticSchema().ToJson());
  ctx.OutputJson(truth, {{"rows", rows}, {"seed", cfg.Seed()}, {"generator", sc.ToJson()}});
  ctx.out() << fmt::format("wrote {} rows to {}\n", d.rows(), out.string());
}

void RunPrep(Context& ctx) {
  const RunConfig& cfg = ctx.config();
  const fs::path in = cfg.Str("prep.in");
  if (in.empty()) throw UsageError("prep needs --in");
  fs::path schema_path = cfg.Str("prep.schema");
  if (schema_path.empty()) {
    schema_path = in;
    schema_path.replace_extension(".schema.json");
  }
  const fs::path out = cfg.Str("prep.out").empty() ? ctx.root() / "encoded" : fs::path(cfg.Str("prep.out"));
  const Schema schema = LoadSchema(schema_path);
  ctx.Input(schema_path);
  const Dataset raw = LoadCsv(in, schema);
  ctx.Input(in);

  PrepOptions options;
  options.sparse_threshold = cfg.Num("prep.sparse_threshold");
  options.correlation_max = cfg.Num("prep.correlation_max");
  options.chi_square_alpha = cfg.Num("prep.chi_square_alpha");
  PreprocessReport report;
  const EncodedMatrix encoded = Preprocess(raw, schema, options, &report);
  const auto [train, test] =
      TrainTestSplit(encoded, {cfg.Num("prep.test_fraction"), DeriveSeed(cfg.Seed(), kSplitStream)});

  ctx.OutputJson(out / "encoder.json", encoded.encoder.ToJson());
  ctx.OutputJson(out / "prep_report.json", report.ToJson());
  for (auto [name, part] : {std::pair{"train.csv", &train}, std::pair{"test.csv", &test}}) {
    std::ostringstream ss;
    WriteEncodedCsv(ss, *part);
    ctx.Output(out / name, ss.str());
  }
  ctx.UpdateState({{"encoded_dir", fs::absolute(out).string()}});
  ctx.out() << fmt::format("encoded {} rows x {} features; train {}, test {}\n", encoded.rows(),
                           encoded.cols(), train.rows(), test.rows());
}

std::vector<std::size_t> ParseHidden(const std::string& text) {
  std::vector<std::size_t> hidden;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      hidden.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw UsageError(fmt::format("invalid hidden layer list '{}'", text));
    }
  }
  return hidden;
}

std::unique_ptr<ProbabilityModel> Train(const RunConfig& cfg, const EncodedMatrix& train) {
  const ModelKind kind = ParseModelKind(cfg.Str("model.kind"));
  const std::uint64_t seed = DeriveSeed(cfg.Seed(), kTrainStream);
  switch (kind) {
    case ModelKind::kLogistic: {
      LogisticParams p;
      p.l2 = cfg.Num("logistic.l2");
      p.max_iterations = cfg.Count("logistic.max_iterations");
      return TrainLogistic(train.X, train.y, train.names, p);
    }
    case ModelKind::kForest: {
      ForestParams p;
      p.n_trees = cfg.Count("forest.n_trees");
      p.max_depth = cfg.Count("forest.max_depth");
      p.max_features = cfg.Count("forest.max_features");
      p.min_samples_leaf = std::max<std::size_t>(1, cfg.Count("forest.min_samples_leaf"));
      p.seed = seed;
      p.jobs = cfg.Jobs();
      return TrainForest(train.X, train.y, train.names, p);
    }
    case ModelKind::kBoosted: {
      BoostedParams p;
      p.n_rounds = cfg.Count("boosted.rounds");
      p.max_depth = cfg.Count("boosted.max_depth");
      p.learning_rate = cfg.Num("boosted.learning_rate");
      p.seed = seed;
      return TrainBoosted(train.X, train.y, train.names, p);
    }
    case ModelKind::kSvmLinear: {
      SvmParams p;
      p.c = cfg.Num("svm.c");
      p.epochs = cfg.Count("svm.epochs");
      p.method = cfg.Str("svm.probability") == "raw" ? SvmProbabilityMethod::kRawSigmoid
                                                     : SvmProbabilityMethod::kPlatt;
      p.seed = seed;
      return TrainSvmLinear(train.X, train.y, train.names, p);
    }
    case ModelKind::kMlp: {
      MlpParams p;
      p.hidden = ParseHidden(cfg.Str("mlp.hidden"));
      p.epochs = cfg.Count("mlp.epochs");
      p.batch_size = std::max<std::size_t>(1, cfg.Count("mlp.batch_size"));
      p.learning_rate = cfg.Num("mlp.learning_rate");
      p.seed = seed;
      return TrainMlp(train.X, train.y, train.names, p);
    }
  }
  throw UsageError("unknown model kind");
}

void RunTrain(Context& ctx) {
  const Splits s = LoadSplits(ctx);
  const auto model = Train(ctx.config(), s.train);
  const fs::path path = ctx.config().Str("model.path").empty()
                            ? ctx.root() / "models" / (KindName(*model) + ".json")
                            : fs::path(ctx.config().Str("model.path"));
  ctx.OutputJson(path, model->ToJson());
  ctx.UpdateState({{"model_path", fs::absolute(path).string()}});
  const Metrics m = Evaluate(*model, s.train.X, s.train.y);
  ctx.out() << fmt::format("trained {} on {} rows; train accuracy {:.4f}, AUC {:.4f}\n",
                           KindName(*model), s.train.rows(), m.accuracy, m.roc_auc);
}

void RunEval(Context& ctx) {
  const Splits s = LoadSplits(ctx);
  const auto model = LoadModelFor(ctx);
  const EncodedMatrix& data = ctx.config().Str("eval.split") == "train" ? s.train : s.test;
  CheckColumns(*model, data);
  const Metrics m = Evaluate(*model, data.X, data.y, ctx.config().Num("eval.threshold"));
  json report = m.ToJson();
  report["split"] = ctx.config().Str("eval.split");
  report["rows"] = data.rows();
  report["model"] = KindName(*model);
  ctx.OutputJson(ctx.Reports() / ArtifactName(KindName(*model), "eval", "metrics", "json"), report);
  ctx.out() << report.dump(1) << "\n";
}

void RunExplainLime(Context& ctx) {
  const RunConfig& cfg = ctx.config();
  const Splits s = LoadSplits(ctx);
  const auto model = LoadModelFor(ctx);
  CheckColumns(*model, s.test);
  const std::size_t instance = cfg.Count("lime.instance");
  if (instance >= s.test.rows()) {
    throw UsageError(fmt::format("--instance {} outside the {} test rows", instance, s.test.rows()));
  }
  LimeConfig lc;
  lc.n_samples = cfg.Count("lime.samples");
  lc.top_k = cfg.Count("lime.k");
  if (cfg.Num("lime.kernel_width") > 0.0) lc.kernel_width = cfg.Num("lime.kernel_width");
  lc.discretizer = cfg.Str("lime.discretizer") == "none" ? DiscretizerKind::kNone : DiscretizerKind::kQuartile;
  lc.ridge_penalty = cfg.Num("lime.ridge");
  lc.seed = DeriveSeed(cfg.Seed(), kLimeStream);
  const Discretizer disc = Discretizer::Fit(s.train.X, s.train.names);
  const std::vector<std::size_t> ids = {instance};
  const auto explanations = kernels::ExplainBatchSerial(*model, s.test.X, ids, disc, lc);
  const LocalExplanation& e = explanations.front();
  ctx.OutputJson(ctx.Explanations() /
                     ArtifactName(KindName(*model), "lime", fmt::format("instance{}", instance), "json"),
                 e.ToJson());
  ctx.out() << e.RenderTable();
}

// Explains a seeded sample of test rows; writes the matrix, the explained
// rows and the background.
void RunExplainShap(Context& ctx, bool exact) {
  const RunConfig& cfg = ctx.config();
  const Splits s = LoadSplits(ctx);
  const auto model = LoadModelFor(ctx);
  CheckColumns(*model, s.test);
  const std::string kind = KindName(*model);
  const std::string explainer = exact ? "exact" : "shap";

  const auto rows = SampleRows(s.test.rows(), cfg.Count("shap.n"), DeriveSeed(cfg.Seed(), kExplainRowsStream));
  const EncodedMatrix explained = s.test.select_rows(rows);
  const Background bg = MakeBackground(ctx, s.train.X);

  const auto start = std::chrono::steady_clock::now();
  ShapMatrix sm;
  if (exact) {
    sm.feature_names = explained.names;
    for (std::size_t r = 0; r < explained.rows(); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      sm.results.push_back(ExactShapley(*model, explained.X.row(r), bg));
      sm.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  } else {
    sm = ComputeShapMatrix(*model, explained.X, bg, MakeShapConfig(cfg), explained.names,
                           cfg.Jobs(), ProgressPrinter(ctx.err(), explainer));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir = ctx.Explanations();
  ctx.OutputJson(dir / ArtifactName(kind, explainer, "matrix", "json"), sm.ToJson());
  ctx.OutputCsv(dir / ArtifactName(kind, explainer, "matrix", "csv"), sm);
  ctx.OutputJson(dir / ArtifactName(kind, explainer, "rows", "json"), RowsJson(rows, explained));
  ctx.Output(dir / ArtifactName(kind, explainer, "rows", "csv"), RowsCsv(rows, explained));
  ctx.OutputJson(dir / ArtifactName(kind, explainer, "background", "json"), bg.ToJson());
  // Wall-clock data varies run to run; kept apart from the explanation artifacts.
  std::ostringstream timing;
  sm.WriteTimingCsv(timing);
  WriteText(ctx.root() / "logs" / ArtifactName(kind, explainer, "timing", "csv"), timing.str());

  ctx.out() << fmt::format("explained {} rows with {} ({} features, background {}) in {:.2f}s; "
                           "max local accuracy gap {:.3g}\n",
                           sm.rows(), explainer, sm.cols(), bg.size(), seconds,
                           sm.MaxLocalAccuracyGap());
}

void RunAle(Context& ctx) {
  const RunConfig& cfg = ctx.config();
  const Splits s = LoadSplits(ctx);
  const auto model = LoadModelFor(ctx);
  CheckColumns(*model, s.train);
  const std::string kind = KindName(*model);
  std::vector<std::size_t> features;
  const std::string list = cfg.Str("ale.features");
  if (list.empty()) {
    features.resize(s.train.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
  } else {
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) features.push_back(ResolveFeature(s.train.names, item));
  }
  const std::size_t intervals = cfg.Count("ale.intervals");
  if (intervals < 2) throw UsageError("--intervals must be at least 2");
  const auto curves =
      cfg.Jobs() > 1
          ? kernels::AleCurvesParallel(*model, s.train.X, features, intervals, s.train.names, cfg.Jobs())
          : kernels::AleCurvesSerial(*model, s.train.X, features, intervals, s.train.names);
  json all = json::array();
  for (const auto& c : curves) {
    all.push_back(c.ToJson());
    ctx.OutputCsv(ctx.Explanations() / ArtifactName(kind, "ale", Sanitize(c.name), "csv"), c);
  }
  ctx.OutputJson(ctx.Explanations() / ArtifactName(kind, "ale", "curves", "json"), all);
  ctx.out() << fmt::format("computed {} ALE curves for {}\n", curves.size(), kind);
}

struct StoredExplanation {
  ShapMatrix sm;
  Matrix X;
};

StoredExplanation LoadExplanation(Context& ctx, const std::string& kind, const std::string& explainer) {
  const fs::path dir = ctx.Explanations();
  const fs::path matrix = dir / ArtifactName(kind, explainer, "matrix", "json");
  const fs::path rows = dir / ArtifactName(kind, explainer, "rows", "json");
  if (!fs::exists(matrix) || !fs::exists(rows)) {
    throw Error(ErrorCode::kIo, fmt::format("{} not found; run explain {} first", matrix.string(), explainer));
  }
  StoredExplanation e;
  e.sm = ShapMatrix::FromJson(ReadJson(matrix));
  ctx.Input(matrix);
  e.X = MatrixFromJson(ReadJson(rows).at("X"), e.sm.cols());
  ctx.Input(rows);
  return e;
}

void RunReport(Context& ctx, const std::string& view) {
  const RunConfig& cfg = ctx.config();
  const auto model = LoadModelFor(ctx);
  const std::string kind = KindName(*model);
  const std::string explainer = cfg.Str("report.explainer");
  const StoredExplanation e = LoadExplanation(ctx, kind, explainer);
  const fs::path dir = ctx.Reports();
  const std::size_t top_n = cfg.Count("report.top_n");

  if (view == "summary") {
    const SummaryData data = MakeSummary(e.sm, e.X, top_n);
    ctx.OutputJson(dir / ArtifactName(kind, explainer, "summary", "json"), data.ToJson());
    ctx.OutputCsv(dir / ArtifactName(kind, explainer, "summary", "csv"), data);
    for (std::size_t i = 0; i < data.features.size(); ++i) {
      ctx.out() << fmt::format("{:>3}  {:<40} {:.6f}\n", i + 1, data.features[i].name,
                               data.features[i].mean_abs_phi);
    }
  } else if (view == "dependence") {
    const std::string key = cfg.Str("report.feature");
    const std::size_t j = key.empty() ? TopFeatures(e.sm.MeanAbsPhi(), 1).front()
                                      : ResolveFeature(e.sm.feature_names, key);
    const DependenceData data = MakeDependence(e.sm, e.X, j);
    const std::string tag = "dependence-" + Sanitize(data.feature_name);
    ctx.OutputJson(dir / ArtifactName(kind, explainer, tag, "json"), data.ToJson());
    ctx.OutputCsv(dir / ArtifactName(kind, explainer, tag, "csv"), data);
    ctx.out() << fmt::format("{}: interaction partner {}\n", data.feature_name, data.partner_name);
  } else if (view == "force") {
    const std::string key = cfg.Str("report.sort");
    const ForceSort sort =
        key == "output" ? ForceSort::ByOutput() : ForceSort::ByFeature(ResolveFeature(e.sm.feature_names, key));
    const ForceData data = MakeForce(e.sm, sort, &e.X);
    ctx.OutputJson(dir / ArtifactName(kind, explainer, "force", "json"), data.ToJson());
    ctx.OutputCsv(dir / ArtifactName(kind, explainer, "force", "csv"), data);
    ctx.out() << fmt::format("force data for {} instances\n", data.stack.size());
  } else {
    const auto gain = InformationGainImportance(*model);
    const ImportanceComparison cmp = CompareImportance(gain, e.sm, top_n);
    ctx.OutputJson(dir / ArtifactName(kind, "compare", "importance", "json"), cmp.ToJson());
    ctx.OutputCsv(dir / ArtifactName(kind, "compare", "importance", "csv"), cmp);
    ctx.out() << fmt::format("top-{} jaccard {:.3f}, spearman {:.3f}, gain top share {:.3f}, "
                             "shap top share of top five {:.3f}\n",
                             top_n, cmp.jaccard, cmp.spearman, cmp.gain_top_share,
                             cmp.shap_top_share_of_top5);
  }
}

// Top-n mean |phi| sets from a small and a large independent sample of test
// rows, compared by Jaccard overlap.
void RunBenchConsistency(Context& ctx) {
  const RunConfig& cfg = ctx.config();
  const Splits s = LoadSplits(ctx);
  const auto model = LoadModelFor(ctx);
  CheckColumns(*model, s.test);
  const std::string kind = KindName(*model);
  const Background bg = MakeBackground(ctx, s.train.X);
  const ShapConfig sc = MakeShapConfig(cfg);
  const std::size_t top_n = cfg.Count("bench.top_n");

  json runs = json::array();
  std::vector<std::vector<std::size_t>> tops;
  for (const auto& [label, key, stream] :
       {std::tuple{"small", "bench.small", kSmallBatchStream}, std::tuple{"large", "bench.large", kExplainRowsStream}}) {
    const auto rows = SampleRows(s.test.rows(), cfg.Count(key), DeriveSeed(cfg.Seed(), stream));
    const Matrix X = s.test.X.select_rows(rows);
    const auto t0 = std::chrono::steady_clock::now();
    const ShapMatrix sm = ComputeShapMatrix(*model, X, bg, sc, s.test.names, cfg.Jobs(),
                                            ProgressPrinter(ctx.err(), label));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto mean_abs = sm.MeanAbsPhi();
    tops.push_back(TopFeatures(mean_abs, top_n));
    std::vector<std::string> names;
    for (std::size_t j : tops.back()) names.push_back(s.test.names[j]);
    runs.push_back({{"label", label},
                    {"rows", sm.rows()},
                    {"top", names},
                    {"mean_abs_phi", mean_abs},
                    {"max_local_accuracy_gap", sm.MaxLocalAccuracyGap()}});
    ctx.err() << fmt::format("{} batch: {} rows in {:.2f}s\n", label, sm.rows(), seconds);
  }
  const double jaccard = Jaccard(tops[0], tops[1]);
  const json report = {{"top_n", top_n}, {"jaccard", jaccard}, {"runs", runs}};
  ctx.OutputJson(ctx.Reports() / ArtifactName(kind, "shap", "consistency", "json"), report);
  ctx.out() << fmt::format("top-{} jaccard between {} and {} rows: {:.3f}\n", top_n,
                           runs[0]["rows"].get<std::size_t>(), runs[1]["rows"].get<std::size_t>(), jaccard);
}

void PrintErrorRecord(std::ostream& err, const std::string& command, std::string_view kind,
                      const std::string& message, int status) {
  const json record = {{"error", kind}, {"message", message}, {"command", command}, {"exit_code", status}};
  err << record.dump() << "\n";
}

}  // namespace

const json& ConfigDefaults() {
  static const json defaults = {
      {"seed", 42},
      {"jobs", 1},
      {"root", ""},
      {"synth.rows", 5000},
      {"synth.out", "data.csv"},
      {"synth.preset", "default"},
      {"prep.in", ""},
      {"prep.schema", ""},
      {"prep.out", ""},
      {"prep.sparse_threshold", 0.9},
      {"prep.correlation_max", 0.9},
      {"prep.chi_square_alpha", 0.05},
      {"prep.test_fraction", 0.2},
      {"data", ""},
      {"model.kind", "boosted"},
      {"model.path", ""},
      {"logistic.l2", 1e-3},
      {"logistic.max_iterations", 5000},
      {"forest.n_trees", 500},
      {"forest.max_depth", 20},
      {"forest.max_features", 0},
      {"forest.min_samples_leaf", 1},
      {"boosted.rounds", 100},
      {"boosted.max_depth", 4},
      {"boosted.learning_rate", 0.1},
      {"svm.c", 1.0},
      {"svm.epochs", 50},
      {"svm.probability", "platt"},
      {"mlp.hidden", "35,35"},
      {"mlp.epochs", 20},
      {"mlp.batch_size", 128},
      {"mlp.learning_rate", 1e-3},
      {"eval.split", "test"},
      {"eval.threshold", 0.5},
      {"lime.instance", 0},
      {"lime.k", 10},
      {"lime.samples", 5000},
      {"lime.discretizer", "quartile"},
      {"lime.kernel_width", 0.0},
      {"lime.ridge", 1.0},
      {"shap.n", 100},
      {"shap.coalitions", 0},
      {"shap.exhaustive", false},
      {"shap.background", "kmeans"},
      {"shap.background_k", 30},
      {"shap.background_source_n", 20000},
      {"ale.features", ""},
      {"ale.intervals", 20},
      {"report.explainer", "shap"},
      {"report.top_n", 20},
      {"report.feature", ""},
      {"report.sort", "output"},
      {"bench.small", 100},
      {"bench.large", 2000},
      {"bench.top_n", 20},
  };
  return defaults;
}

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Fnv1aHex(std::string_view bytes) { return fmt::format("{:016x}", Fnv1a(bytes)); }

std::string HashFile(const fs::path& path) { return Fnv1aHex(ReadText(path)); }

int RunCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"credx: explainability toolkit for credit-default classifiers", "credx"};
  app.require_subcommand(1);
  app.fallthrough();

  // Each flag writes its text into a slot keyed by config key; slots with a
  // count are applied over the file values after parsing.
  struct Slot {
    std::string key;
    std::string text;
    bool flag = false;
    CLI::Option* option = nullptr;
  };
  std::vector<std::unique_ptr<Slot>> slots;
  const auto bind = [&](CLI::App* sub, const std::string& name, const std::string& key,
                        const std::string& help) {
    auto slot = std::make_unique<Slot>();
    slot->key = key;
    const json& def = ConfigDefaults().at(key);
    if (def.is_boolean()) {
      slot->flag = true;
      slot->option = sub->add_flag(name, help);
    } else {
      slot->option = sub->add_option(name, slot->text, fmt::format("{} (default {})", help, def.dump()));
    }
    slots.push_back(std::move(slot));
  };

  std::string config_path;
  app.add_option("--config", config_path, "flat JSON config file; flags override its values");
  bind(&app, "--seed", "seed", "master seed");
  bind(&app, "--jobs", "jobs", "worker threads");
  bind(&app, "--root", "root", fmt::format("artifact root (else ${}, else ./credx_artifacts)", kArtifactRootEnv));

  auto* synth = app.add_subcommand("synth", "generate a synthetic loan table");
  bind(synth, "--rows", "synth.rows", "row count");
  bind(synth, "--out", "synth.out", "output CSV");
  bind(synth, "--preset", "synth.preset", "generator preset: default or dominant");

  auto* prep = app.add_subcommand("prep", "clean, filter, encode and split a loan table");
  bind(prep, "--in", "prep.in", "input CSV");
  bind(prep, "--schema", "prep.schema", "schema JSON (default: <in>.schema.json)");
  bind(prep, "--out", "prep.out", "output directory");
  bind(prep, "--sparse-threshold", "prep.sparse_threshold", "drop columns missing more than this fraction");
  bind(prep, "--correlation-max", "prep.correlation_max", "drop the later of pairs with |r| above this");
  bind(prep, "--chi-square-alpha", "prep.chi_square_alpha", "keep categoricals with p below this");
  bind(prep, "--test-fraction", "prep.test_fraction", "held-out fraction");

  const auto bind_model = [&](CLI::App* sub) {
    bind(sub, "--data", "data", "encoded data directory");
    bind(sub, "--kind", "model.kind", "model kind: logistic, forest, boosted, svm, mlp");
    bind(sub, "--model", "model.path", "model JSON path");
  };

  auto* train = app.add_subcommand("train", "train a classifier on the encoded training split");
  bind_model(train);
  bind(train, "--logistic-l2", "logistic.l2", "L2 penalty");
  bind(train, "--logistic-iterations", "logistic.max_iterations", "iteration cap");
  bind(train, "--forest-trees", "forest.n_trees", "trees");
  bind(train, "--forest-depth", "forest.max_depth", "maximum depth");
  bind(train, "--forest-max-features", "forest.max_features", "features per split, 0 for sqrt(D)");
  bind(train, "--forest-min-leaf", "forest.min_samples_leaf", "minimum rows per leaf");
  bind(train, "--boost-rounds", "boosted.rounds", "boosting rounds");
  bind(train, "--boost-depth", "boosted.max_depth", "tree depth");
  bind(train, "--boost-lr", "boosted.learning_rate", "learning rate");
  bind(train, "--svm-c", "svm.c", "soft-margin C");
  bind(train, "--svm-epochs", "svm.epochs", "passes over the data");
  bind(train, "--svm-probability", "svm.probability", "platt or raw");
  bind(train, "--mlp-hidden", "mlp.hidden", "hidden layer sizes, comma separated");
  bind(train, "--mlp-epochs", "mlp.epochs", "epochs");
  bind(train, "--mlp-batch", "mlp.batch_size", "mini-batch size");
  bind(train, "--mlp-lr", "mlp.learning_rate", "Adam learning rate");

  auto* eval = app.add_subcommand("eval", "score a trained model");
  bind_model(eval);
  bind(eval, "--split", "eval.split", "train or test");
  bind(eval, "--threshold", "eval.threshold", "decision threshold");

  const auto bind_shap = [&](CLI::App* sub) {
    bind(sub, "--coalitions", "shap.coalitions", "coalitions per instance, 0 for the default budget");
    bind(sub, "--exhaustive", "shap.exhaustive", "enumerate every coalition");
    bind(sub, "--background", "shap.background", "kmeans, sample or full");
    bind(sub, "--background-k", "shap.background_k", "background rows");
    bind(sub, "--background-source-n", "shap.background_source_n", "rows sub-sampled before k-means");
  };

  auto* explain = app.add_subcommand("explain", "local explanations");
  explain->require_subcommand(1);
  auto* lime = explain->add_subcommand("lime", "LIME explanation of one test row");
  bind_model(lime);
  bind(lime, "--instance", "lime.instance", "test row index");
  bind(lime, "--k", "lime.k", "features reported");
  bind(lime, "--samples", "lime.samples", "perturbation samples");
  bind(lime, "--discretizer", "lime.discretizer", "quartile or none");
  bind(lime, "--kernel-width", "lime.kernel_width", "proximity kernel width, 0 for 0.75 sqrt(D)");
  bind(lime, "--ridge", "lime.ridge", "surrogate ridge penalty");
  auto* shap = explain->add_subcommand("shap", "Kernel SHAP over a sample of test rows");
  bind_model(shap);
  bind(shap, "--n", "shap.n", "test rows explained");
  bind_shap(shap);
  auto* exact = explain->add_subcommand("exact", "exact Shapley enumeration (at most 15 features)");
  bind_model(exact);
  bind(exact, "--n", "shap.n", "test rows explained");
  bind(exact, "--background", "shap.background", "kmeans, sample or full");
  bind(exact, "--background-k", "shap.background_k", "background rows");
  bind(exact, "--background-source-n", "shap.background_source_n", "rows sub-sampled before k-means");

  auto* ale = app.add_subcommand("ale", "accumulated local effects curves");
  bind_model(ale);
  bind(ale, "--features", "ale.features", "comma separated names or indices, empty for all");
  bind(ale, "--intervals", "ale.intervals", "quantile intervals");

  auto* report = app.add_subcommand("report", "plot-ready views of stored explanations");
  report->require_subcommand(1);
  std::map<std::string, CLI::App*> views;
  for (const std::string view : {"summary", "dependence", "force", "compare"}) {
    auto* sub = report->add_subcommand(view, fmt::format("{} view", view));
    bind_model(sub);
    bind(sub, "--explainer", "report.explainer", "shap or exact");
    if (view != "force" && view != "dependence") bind(sub, "--top-n", "report.top_n", "features retained");
    if (view == "dependence") bind(sub, "--feature", "report.feature", "feature name or index, empty for the top one");
    if (view == "force") bind(sub, "--sort", "report.sort", "'output' or a feature name");
    views[view] = sub;
  }

  auto* bench = app.add_subcommand("bench", "experiments");
  bench->require_subcommand(1);
  auto* consistency = bench->add_subcommand("consistency", "top features from a small vs a large batch");
  bind_model(consistency);
  bind(consistency, "--small", "bench.small", "rows in the small batch");
  bind(consistency, "--large", "bench.large", "rows in the large batch");
  bind(consistency, "--top-n", "bench.top_n", "features compared");
  bind_shap(consistency);

  std::string command = args.empty() ? "" : args.front();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      throw UsageError(e.what());
    }

    RunConfig config;
    if (!config_path.empty()) config.LoadFile(config_path);
    for (const auto& slot : slots) {
      if (slot->option->count() == 0) continue;
      if (slot->flag) {
        config.Set(slot->key, true);
      } else {
        config.SetFromText(slot->key, slot->text);
      }
    }

    const auto selected = [](CLI::App* a) { return a->parsed(); };
    std::string view;
    if (selected(synth)) command = "synth";
    else if (selected(prep)) command = "prep";
    else if (selected(train)) command = "train";
    else if (selected(eval)) command = "eval";
    else if (selected(lime)) command = "explain-lime";
    else if (selected(shap)) command = "explain-shap";
    else if (selected(exact)) command = "explain-exact";
    else if (selected(ale)) command = "ale";
    else if (selected(consistency)) command = "bench-consistency";
    else {
      for (const auto& [name, sub] : views) {
        if (selected(sub)) view = name;
      }
      if (view.empty()) throw UsageError("no command given");
      command = "report-" + view;
    }

    Context ctx(command, std::move(config), out, err);
    const auto start = std::chrono::steady_clock::now();
    if (command == "synth") RunSynth(ctx);
    else if (command == "prep") RunPrep(ctx);
    else if (command == "train") RunTrain(ctx);
    else if (command == "eval") RunEval(ctx);
    else if (command == "explain-lime") RunExplainLime(ctx);
    else if (command == "explain-shap") RunExplainShap(ctx, false);
    else if (command == "explain-exact") RunExplainShap(ctx, true);
    else if (command == "ale") RunAle(ctx);
    else if (command == "bench-consistency") RunBenchConsistency(ctx);
    else RunReport(ctx, view);
    ctx.WriteManifest(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return kExitOk;
  } catch (const UsageError& e) {
    PrintErrorRecord(err, command, "Usage", e.what(), kExitUsage);
    if (args.empty()) err << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    PrintErrorRecord(err, command, ErrorCodeName(e.code()), e.what(), kExitFailure);
    return kExitFailure;
  } catch (const fs::filesystem_error& e) {
    PrintErrorRecord(err, command, "Io", e.what(), kExitFailure);
    return kExitFailure;
  } catch (const std::exception& e) {
    PrintErrorRecord(err, command, "Internal", e.what(), kExitFailure);
    return kExitFailure;
  }
}

}  // namespace credx::cli
