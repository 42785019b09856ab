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

// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// process exits nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "credx/ale.hpp"
#include "credx/background.hpp"
#include "credx/cli.hpp"
#include "credx/dataset.hpp"
#include "credx/error.hpp"
#include "credx/export.hpp"
#include "credx/lime.hpp"
#include "credx/model.hpp"
#include "credx/shap.hpp"
#include "credx/stats.hpp"
#include "credx/synthetic.hpp"
#include "../test_util.hpp"

namespace credx {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Labels from a noisy logistic rule with one interaction, so every model
// kind has something non-trivial to fit.
std::vector<int> RuleLabels(const Matrix& X, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> beta(X.cols());
  for (double& b : beta) b = StandardNormal(rng);
  std::vector<int> y(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double z = 0;
    for (std::size_t j = 0; j < X.cols(); ++j) z += beta[j] * X(i, j);
    if (X.cols() > 1) z += X(i, 0) * X(i, 1);
    y[i] = Uniform01(rng) < Sigmoid(z) ? 1 : 0;
  }
  return y;
}

// Small but real configurations of every model kind.
std::unique_ptr<ProbabilityModel> TrainKind(ModelKind kind, const Matrix& X, std::span<const int> y,
                                            const std::vector<std::string>& names, std::uint64_t seed) {
  switch (kind) {
    case ModelKind::kLogistic:
      return TrainLogistic(X, y, names);
    case ModelKind::kForest: {
      ForestParams p;
      p.n_trees = 100;
      p.max_depth = 10;
      p.seed = seed;
      return TrainForest(X, y, names, p);
    }
    case ModelKind::kBoosted: {
      BoostedParams p;
      p.seed = seed;
      return TrainBoosted(X, y, names, p);
    }
    case ModelKind::kSvmLinear: {
      SvmParams p;
      p.seed = seed;
      return TrainSvmLinear(X, y, names, p);
    }
    case ModelKind::kMlp: {
      MlpParams p;
      p.hidden = {16, 16};
      p.epochs = 10;
      p.seed = seed;
      return TrainMlp(X, y, names, p);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind");
}

constexpr ModelKind kKinds[] = {ModelKind::kLogistic, ModelKind::kForest, ModelKind::kBoosted,
                                ModelKind::kSvmLinear, ModelKind::kMlp};

struct Split {
  EncodedMatrix train, test;
};

Split SyntheticSplit(std::size_t rows, std::uint64_t seed, const SyntheticConfig& config = {}) {
  const Dataset raw = GenerateSynthetic(rows, seed, config);
  PreprocessReport report;
  const EncodedMatrix encoded = Preprocess(raw, SyntheticSchema(), PrepOptions{}, &report);
  auto [train, test] = TrainTestSplit(encoded, {0.2, DeriveSeed(seed, 1)});
  return {std::move(train), std::move(test)};
}

std::vector<std::size_t> FirstRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// ---------------------------------------------------------------------------

Outcome KernelMatchesExactShapley() {
  const auto start = Clock::now();
  const std::size_t sizes[] = {1, 5, 30};
  double worst = 0;
  std::size_t explained = 0;
  for (std::size_t m = 0; m < 50; ++m) {
    const ModelKind kind = kKinds[m % 5];
    const std::size_t d = 2 + m % 9;
    const std::size_t k = sizes[m % 3];
    const Matrix X = testing::RandomNormalMatrix(300, d, 1000 + m);
    const auto y = RuleLabels(X, 2000 + m);
    const auto model = TrainKind(kind, X, y, testing::FeatureNames(d), m);
    const Background bg = k == 30 ? SummarizeBackground(X, k, 300, m) : Background::Sample(X, k, m);
    const Matrix probe = testing::RandomNormalMatrix(2, d, 3000 + m);
    ShapConfig cfg;
    cfg.exhaustive = true;
    for (std::size_t i = 0; i < probe.rows(); ++i) {
      const auto kernel = KernelShap(*model, probe.row(i), bg, cfg);
      const auto exact = ExactShapley(*model, probe.row(i), bg);
      for (std::size_t j = 0; j < d; ++j) worst = std::max(worst, std::abs(kernel.phi[j] - exact.phi[j]));
      ++explained;
    }
  }
  const double seconds = Seconds(start);
  return {worst < 1e-6 && seconds < 120.0,
          fmt::format("50 models, {} instances, max |dphi| {:.2e}, {:.1f}s", explained, worst, seconds)};
}

Outcome LocalAccuracy() {
  std::string detail;
  bool pass = true;
  // Exhaustive mode on an 8-feature problem.
  {
    const Matrix X = testing::RandomNormalMatrix(600, 8, 11);
    const auto y = RuleLabels(X, 12);
    const Background bg = SummarizeBackground(X, 30, 600, 13);
    const Matrix probe = testing::RandomNormalMatrix(100, 8, 14);
    ShapConfig cfg;
    cfg.exhaustive = true;
    double worst = 0;
    for (ModelKind kind : kKinds) {
      const auto model = TrainKind(kind, X, y, testing::FeatureNames(8), 15);
      const auto sm = ComputeShapMatrix(*model, probe, bg, cfg, testing::FeatureNames(8));
      worst = std::max(worst, sm.MaxLocalAccuracyGap());
    }
    pass = pass && worst < 1e-9;
    detail += fmt::format("exhaustive max gap {:.2e}", worst);
  }
  // Sampled mode on the encoded synthetic loan table.
  {
    const Split s = SyntheticSplit(4000, 21);
    const Background bg = SummarizeBackground(s.train.X, 30, 20000, 22);
    const Matrix probe = s.test.X.select_rows(FirstRows(100));
    ShapConfig cfg;
    cfg.seed = 23;
    double worst = 0;
    for (ModelKind kind : kKinds) {
      const auto model = TrainKind(kind, s.train.X, s.train.y, s.train.names, 24);
      const auto sm = ComputeShapMatrix(*model, probe, bg, cfg, s.train.names);
      worst = std::max(worst, sm.MaxLocalAccuracyGap());
    }
    pass = pass && worst < 1e-6;
    detail += fmt::format("; sampled (D={}) max gap {:.2e}", s.train.cols(), worst);
  }
  return {pass, detail + "; 100 instances per kind"};
}

Outcome DummyAndSymmetry() {
  const std::size_t d = 6;
  const Matrix X = testing::RandomNormalMatrix(400, d, 31);
  const auto y = RuleLabels(X, 32);
  ShapConfig cfg;
  cfg.exhaustive = true;
  double dummy = 0, asym = 0;
  for (ModelKind kind : kKinds) {
    const auto model = TrainKind(kind, X, y, testing::FeatureNames(d), 33);

    // Dummy: an extra input column the model never reads.
    const FunctionPredictor padded(d + 1, [&](std::span<const double> x) { return model->Predict(x.first(d)); });
    Matrix Xp(X.rows(), d + 1);
    Rng rng(34);
    for (std::size_t i = 0; i < X.rows(); ++i) {
      for (std::size_t j = 0; j < d; ++j) Xp(i, j) = X(i, j);
      Xp(i, d) = StandardNormal(rng);
    }
    const Background bg_p = SummarizeBackground(Xp, 20, 400, 35);
    for (std::size_t i = 0; i < 20; ++i) {
      dummy = std::max(dummy, std::abs(KernelShap(padded, Xp.row(i), bg_p, cfg).phi[d]));
    }

    // Symmetry: a model symmetric in inputs 0 and 1, explained against a
    // background where the two columns coincide, at instances where they agree.
    const FunctionPredictor symmetric(d, [&](std::span<const double> x) {
      std::vector<double> row(x.begin(), x.end());
      row[0] = row[1] = 0.5 * (x[0] + x[1]);
      return model->Predict(row);
    });
    Matrix Xs = X;
    for (std::size_t i = 0; i < Xs.rows(); ++i) Xs(i, 1) = Xs(i, 0);
    const Background bg_s = SummarizeBackground(Xs, 20, 400, 36);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto r = KernelShap(symmetric, Xs.row(i), bg_s, cfg);
      asym = std::max(asym, std::abs(r.phi[0] - r.phi[1]));
    }
  }
  return {dummy < 1e-9 && asym < 1e-6,
          fmt::format("five kinds x 20 instances; max dummy |phi| {:.2e}, max |phi0 - phi1| {:.2e}", dummy, asym)};
}

Outcome LimeRecoversLogisticSigns() {
  const std::size_t d = 12;
  Rng rng(41);
  std::vector<double> beta(d);
  for (std::size_t j = 0; j < d; ++j) beta[j] = (Uniform01(rng) < 0.5 ? -1.0 : 1.0) * (0.15 + 0.35 * Uniform01(rng));
  Matrix X = testing::RandomNormalMatrix(3000, d, 42);
  for (std::size_t i = 0; i < X.rows(); ++i) X(i, 3) = 40.0 + 12.0 * X(i, 3);  // a raw-unit column
  std::vector<int> y(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double z = 0;
    for (std::size_t j = 0; j < d; ++j) z += beta[j] * (j == 3 ? (X(i, j) - 40.0) / 12.0 : X(i, j));
    y[i] = Uniform01(rng) < Sigmoid(z) ? 1 : 0;
  }
  const auto model = TrainLogistic(X, y, testing::FeatureNames(d));
  const auto w = model->RawWeights();
  const Discretizer disc = Discretizer::Fit(X, testing::FeatureNames(d));
  LimeConfig cfg;
  cfg.discretizer = DiscretizerKind::kNone;
  cfg.top_k = 10;
  std::size_t agree = 0;
  double min_r2 = 1.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t row = UniformIndex(rng, X.rows());
    cfg.seed = DeriveSeed(43, t);
    const auto ex = ExplainInstance(*model, X.row(row), disc, cfg, row);
    bool all = ex.entries.size() == 10;
    for (const auto& e : ex.entries) all = all && (e.weight > 0) == (w[e.feature] > 0);
    agree += all;
    min_r2 = std::min(min_r2, ex.r2);
  }
  return {agree >= 19 && min_r2 > 0.95,
          fmt::format("{}/20 instances with all top-10 signs right, min weighted R2 {:.4f}", agree, min_r2)};
}

double RelativeError(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    scale = std::max({scale, a[i] * a[i], b[i] * b[i]});
  }
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

template <typename Objective>
std::vector<double> CentralDifference(std::vector<double> theta, Objective f) {
  std::vector<double> g(theta.size()), scratch(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    const double h = 1e-5 * std::max(1.0, std::abs(saved));
    theta[k] = saved + h;
    const double up = f(theta, scratch);
    theta[k] = saved - h;
    const double down = f(theta, scratch);
    theta[k] = saved;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

Outcome GradientChecks() {
  double worst_logistic = 0, worst_mlp = 0;
  for (std::uint64_t b = 0; b < 10; ++b) {
    const Matrix X = testing::RandomNormalMatrix(64, 7, 50 + b);
    const auto y = RuleLabels(X, 60 + b);
    Rng rng(70 + b);
    std::vector<double> theta(8);
    for (double& t : theta) t = StandardNormal(rng);
    const auto logistic = [&](const std::vector<double>& t, std::vector<double>& g) {
      return LogisticObjective(t, X, y, 1e-3, g);
    };
    std::vector<double> analytic(theta.size());
    logistic(theta, analytic);
    worst_logistic = std::max(worst_logistic, RelativeError(analytic, CentralDifference(theta, logistic)));

    const std::vector<std::size_t> sizes = {7, 10, 6, 1};
    std::vector<double> params(MlpParamCount(sizes));
    for (double& p : params) p = 0.5 * StandardNormal(rng);
    const auto mlp = [&](const std::vector<double>& t, std::vector<double>& g) {
      return MlpLossAndGradient(sizes, t, X, y, g);
    };
    std::vector<double> backprop(params.size());
    mlp(params, backprop);
    worst_mlp = std::max(worst_mlp, RelativeError(backprop, CentralDifference(params, mlp)));
  }
  return {worst_logistic < 1e-3 && worst_mlp < 1e-3,
          fmt::format("10 batches each; max relative error logistic {:.2e}, mlp {:.2e}", worst_logistic, worst_mlp)};
}

Outcome TopFeatureConsistency() {
  const auto start = Clock::now();
  const Split s = SyntheticSplit(12000, 81);
  const auto model = TrainKind(ModelKind::kBoosted, s.train.X, s.train.y, s.train.names, 82);
  const Background bg = SummarizeBackground(s.train.X, 30, 20000, 83);
  ShapConfig cfg;
  cfg.seed = 84;
  const std::size_t d = s.train.cols();
  if (s.test.rows() < 2100) return {false, fmt::format("only {} test rows", s.test.rows())};
  // Disjoint samples: the first 100 rows and the next 2000.
  std::vector<std::size_t> small = FirstRows(100), large(2000);
  std::iota(large.begin(), large.end(), std::size_t{100});
  const auto sm_small = ComputeShapMatrix(*model, s.test.X.select_rows(small), bg, cfg, s.test.names);
  const auto sm_large = ComputeShapMatrix(*model, s.test.X.select_rows(large), bg, cfg, s.test.names);
  const auto a = sm_small.MeanAbsPhi(), b = sm_large.MeanAbsPhi();
  const double j20 = Jaccard(TopFeatures(a, 20), TopFeatures(b, 20));
  const double j10 = Jaccard(TopFeatures(a, 10), TopFeatures(b, 10));
  const double j5 = Jaccard(TopFeatures(a, 5), TopFeatures(b, 5));
  const double seconds = Seconds(start);
  return {j20 >= 0.7 && seconds < 600.0 && d <= 40,
          fmt::format("D={}, top-20 Jaccard {:.3f} (top-10 {:.3f}, top-5 {:.3f}), {:.0f}s", d, j20, j10, j5,
                      seconds)};
}

Outcome AleSanity() {
  const Split s = SyntheticSplit(4000, 91);
  const Matrix& X = s.train.X;
  double worst_center = 0, worst_slope = 0, worst_refine = 0;
  std::string worst_feature;
  // Centering across every model kind and feature.
  const std::unique_ptr<LogisticModel> logistic = TrainLogistic(X, s.train.y, s.train.names);
  for (ModelKind kind : kKinds) {
    auto model = TrainKind(kind, X, s.train.y, s.train.names, 92);
    for (std::size_t j = 0; j < X.cols(); ++j) {
      const auto curve = ComputeAle(*model, X, j);
      double mean = 0;
      for (std::size_t i = 0; i < X.rows(); ++i) mean += curve.ValueAt(X(i, j));
      worst_center = std::max(worst_center, std::abs(mean / static_cast<double>(X.rows())));
    }
  }
  // Slope of a linear score.
  const FunctionPredictor score(X.cols(), [&](std::span<const double> x) { return logistic->Score(x); });
  const auto w = logistic->RawWeights();
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const auto curve = ComputeAle(score, X, j);
    if (curve.constant_feature) continue;
    for (std::size_t k = 0; k < curve.intervals(); ++k) {
      const double slope = (curve.edge_values[k + 1] - curve.edge_values[k]) / (curve.edges[k + 1] - curve.edges[k]);
      worst_slope = std::max(worst_slope, std::abs(slope - w[j]) / std::max(1.0, std::abs(w[j])));
    }
  }
  // Doubling the interval count on the fitted logistic model: accumulated
  // effects at the coarse edges, measured from the first edge, against the
  // range of the fine curve.
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const auto coarse = ComputeAle(*logistic, X, j, 20);
    const auto fine = ComputeAle(*logistic, X, j, 40);
    if (fine.Range() <= 0.0) continue;
    double dev = 0;
    for (std::size_t k = 0; k < coarse.edges.size(); ++k) {
      const double a = coarse.edge_values[k] - coarse.edge_values[0];
      const double b = fine.ValueAt(coarse.edges[k]) - fine.edge_values[0];
      dev = std::max(dev, std::abs(a - b));
    }
    if (dev / fine.Range() > worst_refine) {
      worst_refine = dev / fine.Range();
      worst_feature = s.train.names[j];
    }
  }
  return {worst_center < 1e-9 && worst_slope < 1e-6 && worst_refine < 0.05,
          fmt::format("max |centered mean| {:.1e}, max slope error {:.1e}, refinement change {:.1f}% of range ({})",
                      worst_center, worst_slope, 100 * worst_refine, worst_feature)};
}

Outcome ImportanceContrast() {
  const Split s = SyntheticSplit(8000, 101, SyntheticConfig::DominantDriver());
  const auto model = TrainKind(ModelKind::kBoosted, s.train.X, s.train.y, s.train.names, 102);
  const auto gain = InformationGainImportance(*model);
  const Background bg = SummarizeBackground(s.train.X, 30, 20000, 103);
  ShapConfig cfg;
  cfg.seed = 104;
  const auto sm = ComputeShapMatrix(*model, s.test.X.select_rows(FirstRows(200)), bg, cfg, s.test.names);
  const auto cmp = CompareImportance(gain, sm, 20);
  const bool dominant_first = gain.front().name == "recoveries";
  return {dominant_first && cmp.gain_top_share >= 0.6 && cmp.shap_top_share_of_top5 < 0.6,
          fmt::format("gain top {} with {:.3f} of the mass; SHAP top feature holds {:.3f} of the top-five mass",
                      gain.front().name, cmp.gain_top_share, cmp.shap_top_share_of_top5)};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome PipelineDeterminism() {
  const fs::path dir = testing::ScratchDir("acceptance_determinism");
  const fs::path config = dir / "config.json";
  std::ofstream(config) << R"({"seed": 7, "synth.rows": 2500, "model.kind": "boosted", "boosted.rounds": 40,
    "lime.samples": 2000, "shap.n": 20, "shap.coalitions": 400, "ale.intervals": 10})";
  const std::vector<std::vector<std::string>> steps = {
      {"prep", "--in", (dir / "loans.csv").string()},
      {"train"},
      {"eval"},
      {"explain", "lime", "--instance", "3"},
      {"explain", "shap"},
      {"ale"},
      {"report", "summary"},
      {"report", "dependence"},
      {"report", "force"},
      {"report", "compare"},
  };
  std::ostringstream sink;
  {
    std::vector<std::string> synth = {"--config", config.string(), "synth", "--out", (dir / "loans.csv").string()};
    if (cli::RunCommand(synth, sink, sink) != cli::kExitOk) return {false, "synth failed: " + sink.str()};
  }
  for (const std::string run : {"a", "b"}) {
    for (auto args : steps) {
      args.insert(args.begin(), {"--config", config.string(), "--root", (dir / run).string()});
      if (cli::RunCommand(args, sink, sink) != cli::kExitOk) {
        return {false, fmt::format("step '{}' failed: {}", args[4], sink.str())};
      }
    }
  }
  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const std::string sub : {"encoded", "models", "explanations", "reports"}) {
    for (const auto& entry : fs::recursive_directory_iterator(dir / "a" / sub)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), dir / "a");
      ++compared;
      if (Slurp(entry.path()) != Slurp(dir / "b" / rel)) differing.push_back(rel.string());
    }
  }
  fs::remove_all(dir);
  return {differing.empty() && compared > 10,
          differing.empty() ? fmt::format("{} artifacts byte-identical across two runs", compared)
                            : fmt::format("{} of {} artifacts differ, first {}", differing.size(), compared,
                                          differing.front())};
}

Outcome BackgroundSummarization() {
  const Split s = SyntheticSplit(6000, 111);
  const auto model = TrainKind(ModelKind::kBoosted, s.train.X, s.train.y, s.train.names, 112);
  const Matrix probe = s.test.X.select_rows(FirstRows(50));
  ShapConfig cfg;
  cfg.seed = 113;
  auto t0 = Clock::now();
  const Background summary = SummarizeBackground(s.train.X, 30, 20000, 114);
  const auto sm_k = ComputeShapMatrix(*model, probe, summary, cfg, s.test.names);
  const double fast = Seconds(t0);
  t0 = Clock::now();
  const Background raw = Background::Sample(s.train.X, 1000, 115);
  const auto sm_raw = ComputeShapMatrix(*model, probe, raw, cfg, s.test.names);
  const double slow = Seconds(t0);
  const double jaccard = Jaccard(TopFeatures(sm_k.MeanAbsPhi(), 10), TopFeatures(sm_raw.MeanAbsPhi(), 10));
  const double speedup = slow / fast;
  return {speedup >= 5.0 && jaccard >= 0.6,
          fmt::format("K=30 k-means {:.1f}s vs 1000 raw rows {:.1f}s ({:.1f}x), top-10 Jaccard {:.3f}", fast, slow,
                      speedup, jaccard)};
}

}  // namespace
}  // namespace credx

int main(int argc, char** argv) {
  using credx::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"kernel SHAP (exhaustive) equals exact Shapley on 50 random models", credx::KernelMatchesExactShapley},
      {"local accuracy on 100-instance batches for every model kind", credx::LocalAccuracy},
      {"dummy and symmetry axioms", credx::DummyAndSymmetry},
      {"LIME recovers logistic coefficient signs", credx::LimeRecoversLogisticSigns},
      {"analytic gradients match central differences", credx::GradientChecks},
      {"top-20 SHAP features agree between 100 and 2000 rows", credx::TopFeatureConsistency},
      {"ALE centering, linear slope and refinement stability", credx::AleSanity},
      {"information gain concentrates where SHAP spreads", credx::ImportanceContrast},
      {"end-to-end runs produce byte-identical artifacts", credx::PipelineDeterminism},
      {"k-means background is faster and agrees on top features", credx::BackgroundSummarization},
  };
  // Optional arguments select checks by number; none runs them all.
  std::vector<std::size_t> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::stoul(argv[a]) - 1);
  if (selected.empty())
    for (std::size_t i = 0; i < checks.size(); ++i) selected.push_back(i);
  std::size_t failed = 0;
  for (std::size_t i : selected) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu acceptance checks passed\n", selected.size() - failed, selected.size());
  return failed == 0 ? 0 : 1;
}
