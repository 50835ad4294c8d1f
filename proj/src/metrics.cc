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

#include "helprank/metrics.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <tuple>

#include "helprank/error.h"
#include "helprank/io_util.h"
#include "json.hpp"

namespace helprank {
namespace {

void CheckLengths(std::span<const double> y, std::span<const double> yhat,
                  size_t min_length) {
  if (y.size() != yhat.size() || y.size() < min_length) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("metric inputs need equal lengths >= {} (got {} and {})",
                            min_length, y.size(), yhat.size()));
  }
}

bool IsConstant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// Sum over runs of equal values (input sorted) of t * (t - 1) / 2.
template <typename Equal>
int64_t TiedPairs(std::span<const size_t> order, Equal equal) {
  int64_t pairs = 0;
  int64_t run = 1;
  for (size_t i = 1; i <= order.size(); ++i) {
    if (i < order.size() && equal(order[i - 1], order[i])) {
      ++run;
    } else {
      pairs += run * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs;
}

// Sorts `order` by key, counting pairs that were strictly inverted.
int64_t MergeSortInversions(std::vector<size_t>& order, std::span<const double> key) {
  std::vector<size_t> buffer(order.size());
  int64_t swaps = 0;
  for (size_t width = 1; width < order.size(); width *= 2) {
    for (size_t lo = 0; lo < order.size(); lo += 2 * width) {
      const size_t mid = std::min(lo + width, order.size());
      const size_t hi = std::min(lo + 2 * width, order.size());
      size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (key[order[j]] < key[order[i]]) {
          swaps += static_cast<int64_t>(mid - i);
          buffer[out++] = order[j++];
        } else {
          buffer[out++] = order[i++];
        }
      }
      while (i < mid) buffer[out++] = order[i++];
      while (j < hi) buffer[out++] = order[j++];
    }
    order.swap(buffer);
  }
  return swaps;
}

auto EntryKey(const ScoredEntry& e) {
  return std::tie(e.review_id, e.product_id, e.target, e.prediction);
}

}  // namespace

double MetricsReport::Get(size_t metric) const {
  return const_cast<MetricsReport*>(this)->Get(metric);
}

double& MetricsReport::Get(size_t metric) {
  switch (metric) {
    case 0: return mae;
    case 1: return rmse;
    case 2: return pcc;
    case 3: return spc;
    case 4: return kc;
    case 5: return ndcg;
  }
  throw Error(ErrorCode::kInvalidArgument, "metric index out of range");
}

double Mae(std::span<const double> y, std::span<const double> yhat) {
  CheckLengths(y, yhat, 1);
  double sum = 0;
  for (size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - yhat[i]);
  return sum / static_cast<double>(y.size());
}

double Rmse(std::span<const double> y, std::span<const double> yhat) {
  CheckLengths(y, yhat, 1);
  double sum = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - yhat[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(y.size()));
}

double Pearson(std::span<const double> y, std::span<const double> yhat) {
  CheckLengths(y, yhat, 2);
  if (IsConstant(y) || IsConstant(yhat)) {
    throw Error(ErrorCode::kUndefinedCorrelation,
                "correlation undefined for a constant vector");
  }
  const double n = static_cast<double>(y.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  const double mh = std::accumulate(yhat.begin(), yhat.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double a = y[i] - my;
    const double b = yhat[i] - mh;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i+1 .. j share their mean rank.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double Spearman(std::span<const double> y, std::span<const double> yhat) {
  CheckLengths(y, yhat, 2);
  const auto ry = AverageRanks(y);
  const auto rh = AverageRanks(yhat);
  return Pearson(ry, rh);
}

double KendallTauB(std::span<const double> y, std::span<const double> yhat) {
  CheckLengths(y, yhat, 2);
  const int64_t n = static_cast<int64_t>(y.size());
  std::vector<size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return y[a] < y[b] || (y[a] == y[b] && yhat[a] < yhat[b]);
  });
  const int64_t tied_y =
      TiedPairs(order, [&](size_t a, size_t b) { return y[a] == y[b]; });
  const int64_t tied_both = TiedPairs(
      order, [&](size_t a, size_t b) { return y[a] == y[b] && yhat[a] == yhat[b]; });
  const int64_t discordant = MergeSortInversions(order, yhat);
  const int64_t tied_yhat =
      TiedPairs(order, [&](size_t a, size_t b) { return yhat[a] == yhat[b]; });

  const int64_t pairs = n * (n - 1) / 2;
  const int64_t untied_y = pairs - tied_y;
  const int64_t untied_yhat = pairs - tied_yhat;
  if (untied_y == 0 || untied_yhat == 0) {
    throw Error(ErrorCode::kUndefinedCorrelation,
                "Kendall's tau undefined for an all-tied vector");
  }
  const int64_t c_minus_d = pairs - tied_y - tied_yhat + tied_both - 2 * discordant;
  return static_cast<double>(c_minus_d) /
         std::sqrt(static_cast<double>(untied_y) * static_cast<double>(untied_yhat));
}

double NdcgAtK(std::span<const ScoredEntry> group, int k) {
  if (group.empty() || k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "NDCG needs a non-empty group and k >= 1");
  }
  std::vector<const ScoredEntry*> ranked;
  ranked.reserve(group.size());
  for (const auto& e : group) ranked.push_back(&e);
  std::sort(ranked.begin(), ranked.end(), [](const ScoredEntry* a, const ScoredEntry* b) {
    if (a->prediction != b->prediction) return a->prediction > b->prediction;
    return EntryKey(*a) < EntryKey(*b);
  });
  std::vector<double> ideal;
  ideal.reserve(group.size());
  for (const auto& e : group) ideal.push_back(e.target);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  const size_t depth = std::min(static_cast<size_t>(k), group.size());
  double dcg = 0, idcg = 0;
  for (size_t i = 0; i < depth; ++i) {
    const double discount = std::log2(static_cast<double>(i) + 2.0);
    dcg += ranked[i]->target / discount;
    idcg += ideal[i] / discount;
  }
  if (idcg == 0) return 1.0;
  return std::min(1.0, dcg / idcg);
}

MetricsReport Evaluate(const ScoredSet& scored, int k) {
  if (scored.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to evaluate");
  for (const auto& e : scored) {
    if (!(e.target >= 0 && e.target <= 1) || !std::isfinite(e.prediction)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("review {}: target must be in [0,1] and prediction "
                              "finite",
                              e.review_id));
    }
  }
  ScoredSet entries = scored;
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return EntryKey(a) < EntryKey(b);
  });
  std::vector<double> y, yhat;
  y.reserve(entries.size());
  yhat.reserve(entries.size());
  for (const auto& e : entries) {
    y.push_back(e.target);
    yhat.push_back(e.prediction);
  }

  MetricsReport report;
  report.k = k;
  report.n = entries.size();
  report.mae = Mae(y, yhat);
  report.rmse = Rmse(y, yhat);
  auto named = [](const char* metric, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: {}", metric, e.what()));
    }
  };
  report.pcc = named("pcc", [&] { return Pearson(y, yhat); });
  report.spc = named("spc", [&] { return Spearman(y, yhat); });
  report.kc = named("kc", [&] { return KendallTauB(y, yhat); });

  std::map<std::string, std::vector<ScoredEntry>> groups;
  for (const auto& e : entries) groups[e.product_id].push_back(e);
  double ndcg_sum = 0;
  for (const auto& [product, group] : groups) ndcg_sum += NdcgAtK(group, k);
  report.products = groups.size();
  report.ndcg = ndcg_sum / static_cast<double>(groups.size());
  return report;
}

void WriteScoredCsv(const std::filesystem::path& path, const ScoredSet& scored) {
  std::string out = "review_id,product_id,target,prediction\n";
  for (const auto& e : scored) {
    out += CsvField(e.review_id) + "," + CsvField(e.product_id) + "," +
           FormatDouble(e.target) + "," + FormatDouble(e.prediction) + "\n";
  }
  WriteFile(path, out);
}

ScoredSet ReadScoredCsv(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path);
  const int id = table.Column("review_id");
  const int product = table.Column("product_id");
  const int target = table.Column("target");
  const int prediction = table.Column("prediction");
  if (id < 0 || product < 0 || target < 0 || prediction < 0) {
    throw Error(ErrorCode::kParse,
                fmt::format("{}: expected columns review_id,product_id,target,"
                            "prediction",
                            path.string()));
  }
  ScoredSet scored;
  scored.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    scored.push_back({row[id], row[product], ParseDouble(row[target]),
                      ParseDouble(row[prediction])});
  }
  return scored;
}

std::string ReportToJson(const MetricsReport& report) {
  nlohmann::ordered_json j;
  for (size_t m = 0; m < MetricsReport::kMetricNames.size(); ++m) {
    j[std::string(MetricsReport::kMetricNames[m])] = report.Get(m);
  }
  j["k"] = report.k;
  j["n"] = report.n;
  j["products"] = report.products;
  return j.dump(2) + "\n";
}

MetricsReport ReportFromJson(std::string_view text) {
  MetricsReport report;
  try {
    const auto j = nlohmann::json::parse(text);
    for (size_t m = 0; m < MetricsReport::kMetricNames.size(); ++m) {
      report.Get(m) = j.at(std::string(MetricsReport::kMetricNames[m])).get<double>();
    }
    report.k = j.at("k").get<int>();
    report.n = j.at("n").get<size_t>();
    report.products = j.value("products", size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad metrics report: ") + e.what());
  }
  return report;
}

}  // namespace helprank
