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


// helprank command-line tool. Each verb covers one pipeline stage; run-all
// drives the whole experiment from a config file.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "helprank/corpus.h"
#include "helprank/embed_io.h"
#include "helprank/error.h"
#include "helprank/features.h"
#include "helprank/forest.h"
#include "helprank/head.h"
#include "helprank/io_util.h"
#include "helprank/metrics.h"
#include "helprank/parallel.h"
#include "helprank/runner.h"
#include "helprank/splitter.h"
#include "helprank/stats.h"

namespace fs = std::filesystem;
using namespace helprank;

namespace {

TTestKind ParseKind(const std::string& name) {
  if (name == "pooled") return TTestKind::kPooled;
  if (name == "welch") return TTestKind::kWelch;
  if (name == "paired") return TTestKind::kPaired;
  throw Error(ErrorCode::kInvalidArgument, "unknown t-test kind " + name);
}

void WriteOrPrint(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    WriteFile(out, text);
  }
}

// Writes predictions.csv and metrics.json for a fitted model.
void FinishCell(const fs::path& dir, const SplitData& split, const ModelOutput& fitted,
                int k) {
  WriteFile(dir / "model.json", fitted.model_json);
  WriteFile(dir / fitted.log_name, fitted.log_csv);
  const ScoredSet scored = ScoreExamples(split.test, fitted.predictions);
  WriteScoredCsv(dir / "predictions.csv", scored);
  const MetricsReport report = Evaluate(scored, k);
  WriteFile(dir / "metrics.json", ReportToJson(report));
  std::cout << ReportToJson(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helprank: review helpfulness prediction experiments"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ingest
  std::string ingest_input, ingest_out, ingest_category;
  auto* ingest = app.add_subcommand("ingest", "Parse and filter a review JSON-lines file");
  ingest->add_option("--input", ingest_input, "reviews (.jsonl or .jsonl.gz)")
      ->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "corpus file to write")->required();
  ingest->add_option("--category", ingest_category, "category name");
  ingest->callback([&] {
    const Corpus corpus = ApplyFilters(ParseDataset(ingest_input), ingest_category);
    WriteCorpus(corpus, ingest_out);
    std::cout << corpus.stats.ToJson();
  });

  // split
  std::string split_corpus, split_out;
  uint64_t split_seed = 1;
  auto* split = app.add_subcommand("split", "Assign products to train/val/test");
  split->add_option("--corpus", split_corpus)->required()->check(CLI::ExistingFile);
  split->add_option("--seed", split_seed);
  split->add_option("--out", split_out)->required();
  split->callback([&] {
    const SplitSpec spec = SplitByProduct(ReadCorpus(split_corpus), split_seed);
    WriteSplit(spec, split_out);
    std::cout << fmt::format("test {} / val {} / train {} products\n",
                             spec.test_products.size(), spec.val_products.size(),
                             spec.train_products.size());
  });

  // features
  std::string feat_corpus, feat_lexicon, feat_out;
  bool feat_side = false;
  auto* features = app.add_subcommand("features", "Write lexicon (or side) features as CSV");
  features->add_option("--corpus", feat_corpus)->required()->check(CLI::ExistingFile);
  features->add_option("--lexicon", feat_lexicon)->check(CLI::ExistingFile);
  features->add_flag("--side", feat_side, "star rating and word count instead");
  features->add_option("--out", feat_out)->required();
  features->callback([&] {
    const Corpus corpus = ReadCorpus(feat_corpus);
    if (feat_side) {
      WriteFeatureCsv(feat_out, corpus.examples, SideFeatureMatrix(corpus.examples));
    } else {
      if (feat_lexicon.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "--lexicon is required without --side");
      }
      WriteFeatureCsv(feat_out, corpus.examples,
                      LexiconFeatureMatrix(corpus.examples, Lexicon::Load(feat_lexicon)));
    }
  });

  // train-rf
  std::string rf_corpus, rf_split, rf_lexicon, rf_out, rf_config;
  int rf_k = kDefaultNdcgK;
  auto* train_rf = app.add_subcommand("train-rf", "Grid-search a random forest on lexicon features");
  train_rf->add_option("--corpus", rf_corpus)->required()->check(CLI::ExistingFile);
  train_rf->add_option("--split", rf_split)->required()->check(CLI::ExistingFile);
  train_rf->add_option("--lexicon", rf_lexicon)->required()->check(CLI::ExistingFile);
  train_rf->add_option("--config", rf_config,
                       "experiment config whose forest grid to use (default: built-in grid)")
      ->check(CLI::ExistingFile);
  train_rf->add_option("--k", rf_k, "NDCG cutoff");
  train_rf->add_option("--out", rf_out, "output directory")->required();
  train_rf->callback([&] {
    const Corpus corpus = ReadCorpus(rf_corpus);
    const SplitSpec spec = ReadSplit(rf_split);
    std::vector<ForestConfig> grid = DefaultGrid(spec.seed);
    if (!rf_config.empty()) {
      const ExperimentConfig config = LoadExperimentConfig(rf_config);
      if (config.forest_grid) grid = *config.forest_grid;
    }
    for (auto& g : grid) g.seed = spec.seed;
    const SplitData data = Materialize(corpus, spec);
    FinishCell(rf_out, data,
               FitRandomForest(data, Lexicon::Load(rf_lexicon), grid, ThreadCount()), rf_k);
  });

  // train-head
  std::string head_corpus, head_split, head_embeddings, head_out;
  HeadConfig head_config;
  bool head_side = false;
  int head_k = kDefaultNdcgK;
  auto* train_head = app.add_subcommand("train-head", "Train a regression head on embeddings");
  train_head->add_option("--corpus", head_corpus)->required()->check(CLI::ExistingFile);
  train_head->add_option("--split", head_split)->required()->check(CLI::ExistingFile);
  train_head->add_option("--embeddings", head_embeddings)->required()->check(CLI::ExistingFile);
  train_head->add_flag("--side", head_side, "two-layer head with star rating and word count");
  train_head->add_option("--peak-lr", head_config.peak_lr);
  train_head->add_option("--batch-size", head_config.batch_size);
  train_head->add_option("--epochs", head_config.epochs);
  train_head->add_option("--hidden-dim", head_config.hidden_dim);
  train_head->add_option("--k", head_k, "NDCG cutoff");
  train_head->add_option("--out", head_out, "output directory")->required();
  train_head->callback([&] {
    const Corpus corpus = ReadCorpus(head_corpus);
    const SplitSpec spec = ReadSplit(head_split);
    head_config.use_side_features = head_side;
    head_config.seed = spec.seed;
    const SplitData data = Materialize(corpus, spec);
    FinishCell(head_out, data, FitHead(data, LoadEmbeddings(head_embeddings), head_config),
               head_k);
  });

  // score
  std::string score_predictions, score_corpus, score_out;
  int score_k = kDefaultNdcgK;
  auto* score = app.add_subcommand(
      "score", "Score an external prediction file (review_id,prediction) against a corpus");
  score->add_option("--predictions", score_predictions)->required()->check(CLI::ExistingFile);
  score->add_option("--corpus", score_corpus)->required()->check(CLI::ExistingFile);
  score->add_option("--k", score_k, "NDCG cutoff");
  score->add_option("--out", score_out, "metrics JSON (default: stdout)");
  score->callback([&] {
    const Corpus corpus = ReadCorpus(score_corpus);
    std::unordered_map<std::string, const LabeledExample*> by_id;
    for (const auto& e : corpus.examples) by_id.emplace(e.review.review_id, &e);
    const CsvTable table = ReadCsv(score_predictions);
    const int id_col = table.Column("review_id");
    const int pred_col = table.Column("prediction");
    if (id_col < 0 || pred_col < 0) {
      throw Error(ErrorCode::kParse, "prediction file needs review_id and prediction columns");
    }
    ScoredSet scored;
    std::vector<std::string> unknown;
    for (const auto& row : table.rows) {
      const std::string& id = row.at(id_col);
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        unknown.push_back(id);
        continue;
      }
      scored.push_back({id, it->second->review.product_id, it->second->target,
                        ParseDouble(row.at(pred_col))});
    }
    if (!unknown.empty()) throw JoinError(std::move(unknown));
    WriteOrPrint(score_out, ReportToJson(Evaluate(scored, score_k)));
  });

  // evaluate
  std::string eval_scored, eval_out;
  int eval_k = kDefaultNdcgK;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Compute the six metrics of a review_id,product_id,target,prediction CSV");
  evaluate->add_option("--scored", eval_scored)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--k", eval_k, "NDCG cutoff");
  evaluate->add_option("--out", eval_out, "metrics JSON (default: stdout)");
  evaluate->callback([&] {
    WriteOrPrint(eval_out, ReportToJson(Evaluate(ReadScoredCsv(eval_scored), eval_k)));
  });

  // compare
  std::string cmp_results, cmp_kind = "pooled";
  double cmp_alpha = 0.05;
  auto* compare = app.add_subcommand("compare", "t-test every model pair in a results.csv");
  compare->add_option("--results", cmp_results)->required()->check(CLI::ExistingFile);
  compare->add_option("--alpha", cmp_alpha);
  compare->add_option("--kind", cmp_kind, "pooled, welch or paired");
  compare->callback([&] {
    const ExperimentResult result = LoadResults(cmp_results, cmp_alpha);
    std::cout << RenderVerdictsMarkdown(result, ParseKind(cmp_kind));
  });

  // report
  std::string rep_results, rep_format = "markdown", rep_out;
  double rep_alpha = 0.05;
  auto* report = app.add_subcommand("report", "Render tables from a results.csv");
  report->add_option("--results", rep_results)->required()->check(CLI::ExistingFile);
  report->add_option("--format", rep_format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  report->add_option("--alpha", rep_alpha);
  report->add_option("--out", rep_out, "output directory")->required();
  report->callback([&] {
    const ExperimentResult result = LoadResults(rep_results, rep_alpha);
    const auto files = EmitReport(
        result, rep_format == "csv" ? ReportFormat::kCsv : ReportFormat::kMarkdown, rep_out);
    for (const auto& f : files) std::cout << f.string() << "\n";
  });

  // run-all
  std::string run_config, run_out;
  std::vector<uint64_t> run_seeds;
  std::vector<std::string> run_models;
  std::optional<int> run_k;
  std::optional<int> run_threads;
  auto* run_all = app.add_subcommand("run-all", "Run every (category, model, seed) cell");
  run_all->add_option("--config", run_config)->required()->check(CLI::ExistingFile);
  run_all->add_option("--out", run_out, "output directory (overrides output_dir)");
  run_all->add_option("--seeds", run_seeds, "split seeds (override)");
  run_all->add_option("--models", run_models, "rf, head, head+side (override)");
  run_all->add_option("--k", run_k, "NDCG cutoff (override)");
  run_all->add_option("--threads", run_threads, "worker count (default: HELPRANK_THREADS)");
  run_all->callback([&] {
    ExperimentConfig config = LoadExperimentConfig(run_config);
    if (!run_out.empty()) config.output_dir = run_out;
    if (!run_seeds.empty()) config.seeds = run_seeds;
    if (!run_models.empty()) config.models = run_models;
    if (run_k) config.ndcg_k = *run_k;
    const ExperimentResult result =
        RunExperiment(config, run_threads ? *run_threads : ThreadCount());
    std::cout << RenderMetricsMarkdown(result);
    size_t failed = 0;
    for (const auto& cell : result.cells) failed += cell.ok ? 0 : 1;
    if (failed > 0) {
      std::cerr << fmt::format("{} of {} cells failed\n", failed, result.cells.size());
      exit_code = 1;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const JoinError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
