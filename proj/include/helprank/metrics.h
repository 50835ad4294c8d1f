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

#ifndef HELPRANK_METRICS_H_
#define HELPRANK_METRICS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace helprank {

struct ScoredEntry {
  std::string review_id;
  std::string product_id;
  double target = 0;      // y in [0, 1]
  double prediction = 0;  // finite
};
using ScoredSet = std::vector<ScoredEntry>;

inline constexpr int kDefaultNdcgK = 10;

struct MetricsReport {
  double mae = 0;
  double rmse = 0;
  double pcc = 0;
  double spc = 0;
  double kc = 0;
  double ndcg = 0;
  int k = kDefaultNdcgK;
  size_t n = 0;         // scored reviews
  size_t products = 0;  // NDCG groups

  static constexpr std::array<std::string_view, 6> kMetricNames = {
      "mae", "rmse", "pcc", "spc", "kc", "ndcg"};
  // Metric by position in kMetricNames.
  double Get(size_t metric) const;
  double& Get(size_t metric);
};

// The regression metrics need equal, non-empty lengths; the correlations
// additionally throw kUndefinedCorrelation when either side is constant.
double Mae(std::span<const double> y, std::span<const double> yhat);
double Rmse(std::span<const double> y, std::span<const double> yhat);
double Pearson(std::span<const double> y, std::span<const double> yhat);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of average ranks.
double Spearman(std::span<const double> y, std::span<const double> yhat);

// Kendall's tau-b in O(n log n): concordant minus discordant pairs over
// sqrt((pairs untied in y) * (pairs untied in yhat)).
double KendallTauB(std::span<const double> y, std::span<const double> yhat);

// Linear-gain NDCG@k of one product's reviews. Ranking is by prediction,
// descending, with ties broken by review_id. Returns 1 when the ideal DCG is
// zero.
double NdcgAtK(std::span<const ScoredEntry> group, int k);

// Pooled MAE/RMSE/PCC/SPC/KC over all entries, NDCG@k averaged over
// products. Entries are put in a canonical order first, so the report does
// not depend on input order.
MetricsReport Evaluate(const ScoredSet& scored, int k = kDefaultNdcgK);

// CSV interchange: header review_id,product_id,target,prediction.
void WriteScoredCsv(const std::filesystem::path& path, const ScoredSet& scored);
ScoredSet ReadScoredCsv(const std::filesystem::path& path);

std::string ReportToJson(const MetricsReport& report);
MetricsReport ReportFromJson(std::string_view json);

}  // namespace helprank

#endif  // HELPRANK_METRICS_H_
