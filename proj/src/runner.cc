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

#include "helprank/runner.h"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <set>

#include "helprank/corpus.h"
#include "helprank/embed_io.h"
#include "helprank/error.h"
#include "helprank/features.h"
#include "helprank/io_util.h"
#include "helprank/parallel.h"
#include "helprank/splitter.h"
#include "json.hpp"

namespace helprank {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::array<std::string_view, 6> kMetricHeaders = {"MAE", "RMSE", "PCC",
                                                            "SPC", "KC",   "NDCG"};

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

// "head+side[roberta]" -> ("head+side", "roberta").
std::pair<std::string, std::string> SplitModelName(const std::string& model) {
  const auto open = model.find('[');
  if (open == std::string::npos || model.back() != ']') return {model, ""};
  return {model.substr(0, open), model.substr(open + 1, model.size() - open - 2)};
}

std::string DirName(const std::string& model) {
  auto [kind, producer] = SplitModelName(model);
  return producer.empty() ? kind : kind + "_" + producer;
}

std::vector<double> Targets(const std::vector<LabeledExample>& examples) {
  std::vector<double> y;
  y.reserve(examples.size());
  for (const auto& e : examples) y.push_back(e.target);
  return y;
}

void NormalizeSide(HeadData& data, const Normalizer& n) {
  for (size_t i = 0; i < data.size(); ++i) {
    for (size_t c = 0; c < kSideFeatureDim; ++c) {
      double& v = data.side[i * kSideFeatureDim + c];
      v = (v - n.means[c]) / n.stds[c];
    }
  }
}

FeatureMatrix SideMatrix(const HeadData& data) {
  FeatureMatrix m;
  m.schema = {"stars", "word_count"};
  m.rows = data.size();
  m.values = data.side;
  return m;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CategoryData {
  std::optional<Corpus> corpus;
  std::map<std::string, EmbeddingFile> embeddings;
  std::map<uint64_t, SplitSpec> splits;
  std::map<uint64_t, std::string> split_errors;
  std::string error;
};

struct CellJob {
  size_t category;
  std::string model;
  uint64_t seed;
};

}  // namespace

ScoredSet ScoreExamples(std::span<const LabeledExample> test,
                        std::span<const double> predictions) {
  if (test.size() != predictions.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} predictions for {} reviews", predictions.size(),
                            test.size()));
  }
  ScoredSet scored;
  scored.reserve(test.size());
  for (size_t i = 0; i < test.size(); ++i) {
    scored.push_back({test[i].review.review_id, test[i].review.product_id,
                      test[i].target, predictions[i]});
  }
  return scored;
}

ModelOutput FitRandomForest(const SplitData& split, const Lexicon& lexicon,
                            std::span<const ForestConfig> grid, int threads) {
  const FeatureMatrix train_x = LexiconFeatureMatrix(split.train, lexicon);
  const FeatureMatrix val_x = LexiconFeatureMatrix(split.val, lexicon);
  const FeatureMatrix test_x = LexiconFeatureMatrix(split.test, lexicon);
  const GridSearchResult search = GridSearch(train_x, Targets(split.train), val_x,
                                             Targets(split.val), grid, threads);
  ModelOutput out;
  out.predictions = PredictForest(search.model, test_x);
  out.log_name = "grid_search.csv";
  out.log_csv = "config,val_rmse,selected\n";
  for (size_t g = 0; g < grid.size(); ++g) {
    out.log_csv += fmt::format("{},{},{}\n", CsvField(grid[g].Describe()),
                               FormatDouble(search.val_rmse[g]),
                               grid[g] == search.best ? 1 : 0);
  }
  out.model_json = search.model.ToJson();
  return out;
}

ModelOutput FitHead(const SplitData& split, const EmbeddingFile& embeddings,
                    HeadConfig config) {
  const bool side = config.use_side_features;
  HeadData train = Join(split.train, embeddings, side);
  HeadData val = Join(split.val, embeddings, side);
  HeadData test = Join(split.test, embeddings, side);
  if (side) {
    const Normalizer n = FitNormalizer(SideMatrix(train));
    NormalizeSide(train, n);
    NormalizeSide(val, n);
    NormalizeSide(test, n);
  }
  config.input_dim = embeddings.dim;
  const TrainResult trained = TrainHead(train, val, config);
  ModelOutput out;
  out.predictions = Predict(trained.model, test);
  out.log_name = "train_log.csv";
  out.log_csv = trained.log.ToCsv();
  out.model_json = trained.model.ToJson();
  return out;
}

void ExperimentConfig::Validate() const {
  std::vector<std::string> problems;
  if (categories.empty()) problems.push_back("no categories configured");
  if (seeds.empty()) problems.push_back("at least one seed is required");
  if (ndcg_k < 1) problems.push_back("ndcg_k must be >= 1");
  if (!(alpha > 0 && alpha < 1)) problems.push_back("alpha must be in (0, 1)");
  if (output_dir.empty()) problems.push_back("output_dir is not set");
  bool wants_rf = false, wants_head = false;
  for (const auto& m : models) {
    if (m == "rf") {
      wants_rf = true;
    } else if (m == "head" || m == "head+side") {
      wants_head = true;
    } else {
      problems.push_back(fmt::format("unknown model '{}' (rf, head, head+side)", m));
    }
  }
  if (wants_rf) {
    if (lexicon.empty()) {
      problems.push_back("model rf needs a lexicon");
    } else if (!fs::exists(lexicon)) {
      problems.push_back("lexicon not found: " + lexicon.string());
    }
  }
  std::set<std::string> names;
  for (const auto& c : categories) {
    if (c.name.empty() || !names.insert(c.name).second) {
      problems.push_back(fmt::format("category name '{}' empty or repeated", c.name));
    }
    if (c.dataset.empty() == c.corpus.empty()) {
      problems.push_back(fmt::format("category {}: set exactly one of dataset or corpus",
                                     c.name));
    }
    for (const auto* p : {&c.dataset, &c.corpus}) {
      if (!p->empty() && !fs::exists(*p)) {
        problems.push_back(fmt::format("category {}: file not found: {}", c.name,
                                       p->string()));
      }
    }
    if (wants_head && c.embeddings.empty()) {
      problems.push_back(fmt::format("category {}: head models need embeddings", c.name));
    }
    for (const auto& [producer, path] : c.embeddings) {
      if (!fs::exists(path)) {
        problems.push_back(fmt::format("category {}: embeddings for {} not found: {}",
                                       c.name, producer, path.string()));
      }
    }
  }
  if (forest_grid && forest_grid->empty()) problems.push_back("forest grid is empty");
  if (!problems.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid experiment config:\n  " + fmt::format("{}", fmt::join(problems, "\n  ")));
  }
}

ExperimentConfig ParseExperimentConfig(std::string_view text, const fs::path& base) {
  ExperimentConfig config;
  try {
    const json j = json::parse(text);
    for (const auto& c : j.at("categories")) {
      CategoryConfig category;
      category.name = c.at("name").get<std::string>();
      if (c.contains("dataset")) category.dataset = Resolve(base, c["dataset"]);
      if (c.contains("corpus")) category.corpus = Resolve(base, c["corpus"]);
      if (c.contains("embeddings")) {
        for (const auto& [producer, path] : c["embeddings"].items()) {
          category.embeddings[producer] = Resolve(base, path.get<std::string>());
        }
      }
      config.categories.push_back(std::move(category));
    }
    if (j.contains("lexicon")) config.lexicon = Resolve(base, j["lexicon"]);
    if (j.contains("seeds")) config.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("models")) config.models = j["models"].get<std::vector<std::string>>();
    config.ndcg_k = j.value("ndcg_k", config.ndcg_k);
    config.alpha = j.value("alpha", config.alpha);
    if (j.contains("output_dir")) config.output_dir = Resolve(base, j["output_dir"]);
    if (j.contains("forest")) {
      const json& grid = j["forest"].at("grid");
      if (grid.is_string()) {
        if (grid != "default") throw Error(ErrorCode::kParse, "forest.grid must be "
                                                            "\"default\" or a list");
      } else {
        std::vector<ForestConfig> configs;
        for (const auto& g : grid) {
          ForestConfig fc;
          fc.n_estimators = g.at("n_estimators").get<int>();
          const auto mf = g.at("max_features").get<std::string>();
          fc.max_features = (mf == "sqrt") ? MaxFeatures::kSqrt : MaxFeatures::kAll;
          if (mf != "sqrt" && mf != "all" && mf != "auto") {
            throw Error(ErrorCode::kParse, "max_features must be all, auto or sqrt");
          }
          if (!g.at("max_depth").is_null()) fc.max_depth = g["max_depth"].get<int>();
          fc.min_samples_leaf = g.at("min_samples_leaf").get<int>();
          fc.Validate();
          configs.push_back(fc);
        }
        config.forest_grid = std::move(configs);
      }
    }
    if (j.contains("head")) {
      const json& h = j["head"];
      HeadConfig& hc = config.head;
      hc.peak_lr = h.value("peak_lr", hc.peak_lr);
      hc.batch_size = h.value("batch_size", hc.batch_size);
      hc.epochs = h.value("epochs", hc.epochs);
      hc.hidden_dim = h.value("hidden_dim", hc.hidden_dim);
      hc.adam_beta1 = h.value("adam_beta1", hc.adam_beta1);
      hc.adam_beta2 = h.value("adam_beta2", hc.adam_beta2);
      hc.adam_eps = h.value("adam_eps", hc.adam_eps);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad experiment config: ") + e.what());
  }
  return config;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  return ParseExperimentConfig(ReadFile(path), path.parent_path());
}

std::vector<std::string> CellModels(const ExperimentConfig& config,
                                    const CategoryConfig& category) {
  std::vector<std::string> out;
  for (const auto& m : config.models) {
    if (m == "rf") {
      out.push_back(m);
    } else {
      for (const auto& [producer, path] : category.embeddings) {
        out.push_back(m + "[" + producer + "]");
      }
    }
  }
  return out;
}

bool ExperimentResult::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const auto& c) { return !c.ok; });
}

void Summarize(ExperimentResult& result, const std::vector<std::string>& categories,
               const std::map<std::string, std::vector<std::string>>& models) {
  result.categories.clear();
  for (const auto& name : categories) {
    CategorySummary summary;
    summary.name = name;
    summary.models = models.at(name);
    std::vector<RunSet> complete;
    for (const auto& model : summary.models) {
      RunSet runs{model, {}, {}};
      bool all_ok = true;
      for (uint64_t seed : result.seeds) {
        auto it = std::find_if(result.cells.begin(), result.cells.end(), [&](const auto& c) {
          return c.category == name && c.model == model && c.seed == seed;
        });
        if (it == result.cells.end() || !it->ok) {
          all_ok = false;
          continue;
        }
        runs.seeds.push_back(seed);
        runs.reports.push_back(it->report);
      }
      if (runs.reports.size() >= 2) {
        summary.aggregates[model] = Aggregate(runs);
      } else if (runs.reports.size() == 1) {
        summary.single_runs[model] = runs.reports.front();
      }
      if (all_ok && runs.reports.size() >= 2) complete.push_back(std::move(runs));
    }
    if (complete.size() >= 2) {
      summary.pooled = CompareModels(complete, result.alpha, TTestKind::kPooled);
      summary.paired = CompareModels(complete, result.alpha, TTestKind::kPaired);
    }
    result.categories.push_back(std::move(summary));
  }
}

ExperimentResult RunExperiment(const ExperimentConfig& config, int threads) {
  config.Validate();
  const fs::path& out = config.output_dir;
  fs::create_directories(out);
  std::vector<fs::path> emitted;

  const bool wants_rf =
      std::find(config.models.begin(), config.models.end(), "rf") != config.models.end();
  std::optional<Lexicon> lexicon;
  if (wants_rf) lexicon = Lexicon::Load(config.lexicon);

  std::vector<CategoryData> data(config.categories.size());
  for (size_t c = 0; c < config.categories.size(); ++c) {
    const CategoryConfig& category = config.categories[c];
    CategoryData& d = data[c];
    try {
      d.corpus = category.corpus.empty()
                     ? ApplyFilters(ParseDataset(category.dataset), category.name)
                     : ReadCorpus(category.corpus);
      d.corpus->category = category.name;
      const fs::path stats = out / category.name / "corpus.stats.json";
      WriteFile(stats, d.corpus->stats.ToJson());
      emitted.push_back(stats);
      bool needs_embeddings = false;
      for (const auto& m : config.models) needs_embeddings |= m != "rf";
      if (needs_embeddings) {
        for (const auto& [producer, path] : category.embeddings) {
          d.embeddings[producer] = LoadEmbeddings(path);
        }
      }
    } catch (const std::exception& e) {
      d.error = e.what();
      std::cerr << "category " << category.name << ": " << e.what() << "\n";
      continue;
    }
    for (uint64_t seed : config.seeds) {
      try {
        SplitSpec spec = SplitByProduct(*d.corpus, seed);
        const fs::path path = out / category.name / fmt::format("split-seed{}.json", seed);
        WriteSplit(spec, path);
        emitted.push_back(path);
        d.splits.emplace(seed, std::move(spec));
      } catch (const std::exception& e) {
        d.split_errors[seed] = e.what();
      }
    }
  }

  std::vector<CellJob> jobs;
  std::map<std::string, std::vector<std::string>> models;
  std::vector<std::string> category_names;
  for (size_t c = 0; c < config.categories.size(); ++c) {
    const auto& category = config.categories[c];
    category_names.push_back(category.name);
    models[category.name] = CellModels(config, category);
    for (const auto& model : models[category.name]) {
      for (uint64_t seed : config.seeds) jobs.push_back({c, model, seed});
    }
  }

  ExperimentResult result;
  result.seeds = config.seeds;
  result.ndcg_k = config.ndcg_k;
  result.alpha = config.alpha;
  result.cells.resize(jobs.size());
  std::vector<std::vector<fs::path>> cell_files(jobs.size());

  ParallelFor(jobs.size(), threads, [&](size_t i) {
    const CellJob& job = jobs[i];
    const CategoryConfig& category = config.categories[job.category];
    const CategoryData& d = data[job.category];
    CellResult& cell = result.cells[i];
    cell.category = category.name;
    cell.model = job.model;
    cell.seed = job.seed;
    try {
      if (!d.error.empty()) throw Error(ErrorCode::kIo, d.error);
      if (auto it = d.split_errors.find(job.seed); it != d.split_errors.end()) {
        throw Error(ErrorCode::kInvalidArgument, it->second);
      }
      const SplitData split = Materialize(*d.corpus, d.splits.at(job.seed));
      const fs::path dir = out / "cells" / category.name / DirName(job.model) /
                           fmt::format("seed-{}", job.seed);
      const auto [kind, producer] = SplitModelName(job.model);
      ModelOutput fitted;
      if (kind == "rf") {
        std::vector<ForestConfig> grid =
            config.forest_grid ? *config.forest_grid : DefaultGrid(job.seed);
        for (auto& g : grid) g.seed = job.seed;
        fitted = FitRandomForest(split, *lexicon, grid, 1);
      } else {
        HeadConfig hc = config.head;
        hc.use_side_features = kind == "head+side";
        hc.seed = job.seed;
        fitted = FitHead(split, d.embeddings.at(producer), hc);
      }
      WriteFile(dir / fitted.log_name, fitted.log_csv);
      cell_files[i].push_back(dir / fitted.log_name);
      const std::vector<double>& predictions = fitted.predictions;
      const ScoredSet scored = ScoreExamples(split.test, predictions);
      WriteScoredCsv(dir / "predictions.csv", scored);
      cell_files[i].push_back(dir / "predictions.csv");
      cell.report = Evaluate(scored, config.ndcg_k);
      WriteFile(dir / "metrics.json", ReportToJson(cell.report));
      cell_files[i].push_back(dir / "metrics.json");
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
      std::cerr << fmt::format("cell {}/{}/seed {} failed: {}\n", category.name,
                               job.model, job.seed, e.what());
    }
  });
  for (auto& files : cell_files) emitted.insert(emitted.end(), files.begin(), files.end());

  Summarize(result, category_names, models);
  for (auto format : {ReportFormat::kCsv, ReportFormat::kMarkdown}) {
    auto files = EmitReport(result, format, out);
    emitted.insert(emitted.end(), files.begin(), files.end());
  }
  const ManifestCheck check = WriteManifest(out, emitted);
  if (check.unchanged > 0 || !check.changed.empty()) {
    std::cerr << fmt::format("manifest: {} file(s) unchanged, {} changed, {} new\n",
                             check.unchanged, check.changed.size(), check.added.size());
    for (const auto& p : check.changed) std::cerr << "  changed: " << p << "\n";
  }
  return result;
}

std::string FormatMeanStd(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f (%.4f)", mean, std);
  return buf;
}

namespace {

std::string Fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string TStat(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return FormatDouble(t);
}

}  // namespace

std::string RenderResultsCsv(const ExperimentResult& result) {
  std::string out =
      "category,model,seed,status,mae,rmse,pcc,spc,kc,ndcg,k,n,products,error\n";
  for (const auto& c : result.cells) {
    out += fmt::format("{},{},{},{}", CsvField(c.category), CsvField(c.model), c.seed,
                       c.ok ? "ok" : "failed");
    for (size_t m = 0; m < 6; ++m) {
      out += "," + (c.ok ? FormatDouble(c.report.Get(m)) : std::string());
    }
    if (c.ok) {
      out += fmt::format(",{},{},{},\n", c.report.k, c.report.n, c.report.products);
    } else {
      std::string error = c.error;
      std::replace(error.begin(), error.end(), '\n', ' ');
      out += fmt::format(",{},,,{}\n", result.ndcg_k, CsvField(error));
    }
  }
  return out;
}

std::string RenderAggregatesCsv(const ExperimentResult& result) {
  std::string out = "category,model,metric,mean,std,runs\n";
  for (const auto& cat : result.categories) {
    for (const auto& model : cat.models) {
      auto it = cat.aggregates.find(model);
      if (it == cat.aggregates.end()) continue;
      size_t runs = 0;
      for (const auto& c : result.cells) {
        runs += c.ok && c.category == cat.name && c.model == model;
      }
      for (size_t m = 0; m < 6; ++m) {
        out += fmt::format("{},{},{},{},{},{}\n", CsvField(cat.name), CsvField(model),
                           MetricsReport::kMetricNames[m],
                           FormatDouble(it->second[m].mean),
                           FormatDouble(it->second[m].std), runs);
      }
    }
  }
  return out;
}

std::string RenderVerdictsCsv(const ExperimentResult& result) {
  std::string out =
      "category,test,model_a,model_b,metric,t_statistic,df,p_value,significant\n";
  for (const auto& cat : result.categories) {
    for (const auto* set : {&cat.pooled, &cat.paired}) {
      const char* test = set == &cat.pooled ? "pooled" : "paired";
      for (const auto& pair : *set) {
        for (const auto& v : pair.verdicts) {
          out += fmt::format("{},{},{},{},{},{},{},{},{}\n", CsvField(cat.name), test,
                             CsvField(pair.model_a), CsvField(pair.model_b), v.metric,
                             TStat(v.t_statistic), FormatDouble(v.df),
                             FormatDouble(v.p_value), v.significant ? "Y" : "N");
        }
      }
    }
  }
  return out;
}

std::string RenderMetricsMarkdown(const ExperimentResult& result) {
  std::string out = "| Category | Model |";
  for (auto h : kMetricHeaders) out += fmt::format(" {} |", h);
  out += "\n|---|---|";
  for (size_t m = 0; m < kMetricHeaders.size(); ++m) out += "---|";
  out += "\n";
  for (const auto& cat : result.categories) {
    for (const auto& model : cat.models) {
      out += fmt::format("| {} | {} |", cat.name, model);
      auto agg = cat.aggregates.find(model);
      auto single = cat.single_runs.find(model);
      for (size_t m = 0; m < 6; ++m) {
        if (agg != cat.aggregates.end()) {
          out += " " + FormatMeanStd(agg->second[m].mean, agg->second[m].std) + " |";
        } else if (single != cat.single_runs.end()) {
          out += " " + Fixed4(single->second.Get(m)) + " |";
        } else {
          out += " failed |";
        }
      }
      out += "\n";
    }
  }
  return out;
}

std::string RenderVerdictsMarkdown(const ExperimentResult& result, TTestKind kind) {
  // Pair label -> rows (category, verdicts), in first-appearance order.
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, const PairVerdicts*>>>>
      blocks;
  for (const auto& cat : result.categories) {
    const auto& pairs = kind == TTestKind::kPaired ? cat.paired : cat.pooled;
    for (const auto& pair : pairs) {
      const std::string label = pair.model_a + " vs " + pair.model_b;
      auto it = std::find_if(blocks.begin(), blocks.end(),
                             [&](const auto& b) { return b.first == label; });
      if (it == blocks.end()) {
        blocks.push_back({label, {}});
        it = blocks.end() - 1;
      }
      it->second.emplace_back(cat.name, &pair);
    }
  }
  std::string header = "| Category |";
  for (auto h : kMetricHeaders) header += fmt::format(" {} |", h);
  header += "\n|---|";
  for (size_t m = 0; m < kMetricHeaders.size(); ++m) header += "---|";
  header += "\n";

  std::string out;
  if (blocks.empty()) return header;
  for (const auto& [label, rows] : blocks) {
    out += fmt::format("**{}**\n\n", label) + header;
    for (const auto& [category, pair] : rows) {
      out += fmt::format("| {} |", category);
      for (const auto& v : pair->verdicts) out += v.significant ? " Y |" : " N |";
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

std::vector<fs::path> EmitReport(const ExperimentResult& result, ReportFormat format,
                                 const fs::path& dir) {
  std::vector<fs::path> files;
  auto write = [&](const char* name, const std::string& content) {
    WriteFile(dir / name, content);
    files.push_back(dir / name);
  };
  if (format == ReportFormat::kCsv) {
    write("results.csv", RenderResultsCsv(result));
    write("aggregates.csv", RenderAggregatesCsv(result));
    write("verdicts.csv", RenderVerdictsCsv(result));
    return files;
  }
  std::string md = "# Results\n\n";
  md += fmt::format("Mean over {} split seed(s); sample standard deviation in "
                    "parentheses. NDCG@{} averaged over products.\n\n",
                    result.seeds.size(), result.ndcg_k);
  md += RenderMetricsMarkdown(result);
  md += fmt::format("\n# Significance (two-sample pooled t-test, alpha = {})\n\n"
                    "Y: difference significant, N: not significant.\n\n",
                    FormatDouble(result.alpha));
  md += RenderVerdictsMarkdown(result, TTestKind::kPooled);
  md += fmt::format("\n# Significance (paired t-test over seeds, alpha = {})\n\n",
                    FormatDouble(result.alpha));
  md += RenderVerdictsMarkdown(result, TTestKind::kPaired);
  std::vector<std::string> failures;
  for (const auto& c : result.cells) {
    if (!c.ok) {
      failures.push_back(
          fmt::format("- {} / {} / seed {}: {}", c.category, c.model, c.seed, c.error));
    }
  }
  if (!failures.empty()) {
    md += "\n# Failed cells\n\n" + fmt::format("{}", fmt::join(failures, "\n")) + "\n";
  }
  write("report.md", md);
  return files;
}

ExperimentResult LoadResults(const fs::path& results_csv, double alpha) {
  const CsvTable table = ReadCsv(results_csv);
  const std::array<const char*, 6> metric_cols = {"mae", "rmse", "pcc",
                                                  "spc", "kc",   "ndcg"};
  for (const char* col : {"category", "model", "seed", "status", "k", "n", "products",
                          "error"}) {
    if (table.Column(col) < 0) {
      throw Error(ErrorCode::kParse, fmt::format("{}: missing column {}",
                                                 results_csv.string(), col));
    }
  }
  ExperimentResult result;
  result.alpha = alpha;
  std::vector<std::string> categories;
  std::map<std::string, std::vector<std::string>> models;
  for (const auto& row : table.rows) {
    CellResult cell;
    cell.category = row[table.Column("category")];
    cell.model = row[table.Column("model")];
    cell.seed = std::stoull(row[table.Column("seed")]);
    cell.ok = row[table.Column("status")] == "ok";
    cell.report.k = std::stoi(row[table.Column("k")]);
    result.ndcg_k = cell.report.k;
    if (cell.ok) {
      for (size_t m = 0; m < 6; ++m) {
        cell.report.Get(m) = ParseDouble(row[table.Column(metric_cols[m])]);
      }
      cell.report.n = std::stoull(row[table.Column("n")]);
      cell.report.products = std::stoull(row[table.Column("products")]);
    } else {
      cell.error = row[table.Column("error")];
    }
    if (std::find(categories.begin(), categories.end(), cell.category) ==
        categories.end()) {
      categories.push_back(cell.category);
    }
    auto& ms = models[cell.category];
    if (std::find(ms.begin(), ms.end(), cell.model) == ms.end()) ms.push_back(cell.model);
    if (std::find(result.seeds.begin(), result.seeds.end(), cell.seed) ==
        result.seeds.end()) {
      result.seeds.push_back(cell.seed);
    }
    result.cells.push_back(std::move(cell));
  }
  Summarize(result, categories, models);
  return result;
}

ManifestCheck WriteManifest(const fs::path& dir, const std::vector<fs::path>& files) {
  std::map<std::string, std::string> hashes;
  json entries = json::array();
  std::vector<fs::path> sorted = files;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& f : sorted) {
    const std::string content = ReadFile(f);
    const std::string rel = fs::relative(f, dir).generic_string();
    const std::string hash = Sha256Hex(content);
    hashes[rel] = hash;
    entries.push_back({{"path", rel}, {"sha256", hash}, {"bytes", content.size()}});
  }
  ManifestCheck check;
  const fs::path manifest = dir / "manifest.json";
  std::map<std::string, std::string> previous;
  if (fs::exists(manifest)) {
    try {
      const json old = json::parse(ReadFile(manifest));
      for (const auto& e : old.at("files")) {
        previous[e.at("path").get<std::string>()] = e.at("sha256").get<std::string>();
      }
    } catch (const json::exception&) {
      previous.clear();
    }
  }
  for (const auto& [rel, hash] : hashes) {
    auto it = previous.find(rel);
    if (it == previous.end()) {
      check.added.push_back(rel);
    } else if (it->second == hash) {
      ++check.unchanged;
    } else {
      check.changed.push_back(rel);
    }
  }
  json j;
  j["generated_at"] = UtcNow();
  j["files"] = std::move(entries);
  WriteFile(manifest, j.dump(2) + "\n");
  return check;
}

}  // namespace helprank
