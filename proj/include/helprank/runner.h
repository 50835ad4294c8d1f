/*
 * Copyright 2026 The HelpRank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HELPRANK_RUNNER_H_
#define HELPRANK_RUNNER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "helprank/corpus.h"
#include "helprank/embed_io.h"
#include "helprank/features.h"
#include "helprank/forest.h"
#include "helprank/head.h"
#include "helprank/metrics.h"
#include "helprank/splitter.h"
#include "helprank/stats.h"

namespace helprank {

struct CategoryConfig {
  std::string name;
  // Exactly one of the two: raw review JSON-lines (ingested and filtered), or
  // a corpus file written by `helprank ingest`.
  std::filesystem::path dataset;
  std::filesystem::path corpus;
  // Producer name -> embedding file (binary, or CSV fixture format).
  std::map<std::string, std::filesystem::path> embeddings;
};

// Configuration file (JSON); relative paths resolve against the file's
// directory:
//
//   {
//     "categories": [{"name": "beauty", "dataset": "beauty.jsonl.gz",
//                     "embeddings": {"roberta": "beauty.roberta.emb"}}],
//     "lexicon": "lexicon.json",
//     "seeds": [1, 2, 3],
//     "models": ["rf", "head", "head+side"],
//     "ndcg_k": 10,
//     "alpha": 0.05,
//     "output_dir": "results",
//     "forest": {"grid": "default"},        // or a list of forest configs
//     "head": {"peak_lr": 1e-4, "batch_size": 16, "epochs": 5,
//              "hidden_dim": 64}
//   }
struct ExperimentConfig {
  std::vector<CategoryConfig> categories;
  std::filesystem::path lexicon;
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::vector<std::string> models = {"rf", "head", "head+side"};
  int ndcg_k = kDefaultNdcgK;
  double alpha = 0.05;
  std::filesystem::path output_dir;
  std::optional<std::vector<ForestConfig>> forest_grid;  // nullopt: default grid
  HeadConfig head;

  // Throws kInvalidArgument naming every problem, including missing files.
  void Validate() const;
};

ExperimentConfig ParseExperimentConfig(std::string_view json,
                                       const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Cell model names: "rf", "head[<producer>]", "head+side[<producer>]".
std::vector<std::string> CellModels(const ExperimentConfig& config,
                                    const CategoryConfig& category);

// Test-partition predictions of one fitted model plus its training log.
struct ModelOutput {
  std::vector<double> predictions;  // split.test order
  std::string log_name;             // "grid_search.csv" or "train_log.csv"
  std::string log_csv;
  std::string model_json;
};

// Grid search on train/validation lexicon features; predicts the test part.
ModelOutput FitRandomForest(const SplitData& split, const Lexicon& lexicon,
                            std::span<const ForestConfig> grid, int threads);
// Trains on train, selects the epoch on validation, predicts the test part.
// Side features are z-scored with training-partition statistics.
// config.input_dim is taken from the embedding file.
ModelOutput FitHead(const SplitData& split, const EmbeddingFile& embeddings,
                    HeadConfig config);
ScoredSet ScoreExamples(std::span<const LabeledExample> test,
                        std::span<const double> predictions);

struct CellResult {
  std::string category;
  std::string model;
  uint64_t seed = 0;
  bool ok = false;
  MetricsReport report;
  std::string error;
};

struct CategorySummary {
  std::string name;
  std::vector<std::string> models;
  // (model -> per-metric mean/std) for models with >= 2 successful runs.
  std::map<std::string, std::array<MeanStd, 6>> aggregates;
  // Single successful run: reported without a spread.
  std::map<std::string, MetricsReport> single_runs;
  std::vector<PairVerdicts> pooled;
  std::vector<PairVerdicts> paired;
};

struct ExperimentResult {
  std::vector<uint64_t> seeds;
  int ndcg_k = kDefaultNdcgK;
  double alpha = 0.05;
  std::vector<CellResult> cells;  // category, model, seed order
  std::vector<CategorySummary> categories;

  bool any_failed() const;
};

// Fills aggregates and verdicts from the cells.
void Summarize(ExperimentResult& result, const std::vector<std::string>& categories,
               const std::map<std::string, std::vector<std::string>>& models);

// Splits, fits and evaluates every (category, model, seed) cell, writing
// per-cell artifacts under config.output_dir. A failing cell is recorded and
// does not stop the others. Cells run on up to `threads` workers.
ExperimentResult RunExperiment(const ExperimentConfig& config, int threads);

enum class ReportFormat { kCsv, kMarkdown };

// "0.2041 (0.0014)": mean and std rounded to 4 decimals.
std::string FormatMeanStd(double mean, double std);

std::string RenderResultsCsv(const ExperimentResult& result);
std::string RenderAggregatesCsv(const ExperimentResult& result);
std::string RenderVerdictsCsv(const ExperimentResult& result);
std::string RenderMetricsMarkdown(const ExperimentResult& result);
std::string RenderVerdictsMarkdown(const ExperimentResult& result,
                                   TTestKind kind = TTestKind::kPooled);

// Writes the report files into `dir` and returns their paths.
std::vector<std::filesystem::path> EmitReport(const ExperimentResult& result,
                                              ReportFormat format,
                                              const std::filesystem::path& dir);

// Rebuilds a result from a results.csv written by EmitReport.
ExperimentResult LoadResults(const std::filesystem::path& results_csv,
                             double alpha = 0.05);

struct ManifestCheck {
  size_t unchanged = 0;
  std::vector<std::string> changed;  // relative paths whose hash differs
  std::vector<std::string> added;
};

// manifest.json: every listed file with its sha256, relative to `dir`. If a
// manifest already exists it is compared against the new hashes first.
ManifestCheck WriteManifest(const std::filesystem::path& dir,
                            const std::vector<std::filesystem::path>& files);

}  // namespace helprank

#endif  // HELPRANK_RUNNER_H_
