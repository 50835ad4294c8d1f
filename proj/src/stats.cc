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

#include "helprank/stats.h"

#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "helprank/error.h"

namespace helprank {
namespace {

TestVerdict FromStatistic(double mean_diff, double std_error, double df,
                          double alpha) {
  TestVerdict v;
  v.df = df;
  if (std_error == 0 || !std::isfinite(std_error)) {
    if (mean_diff == 0) {
      v.t_statistic = 0;
      v.p_value = 1;
    } else {
      v.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean_diff);
      v.p_value = 0;
    }
  } else {
    v.t_statistic = mean_diff / std_error;
    v.p_value = StudentTwoSidedP(v.t_statistic, df);
  }
  v.significant = v.p_value < alpha;
  return v;
}

double SampleVariance(std::span<const double> x, double mean) {
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

// A constant sample has exactly its value as mean, so that its variance is
// exactly zero and the zero standard error rule applies.
double Mean(std::span<const double> x) {
  if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) {
    return x.front();
  }
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

MeanStd MeanAndSampleStd(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "standard deviation needs at least two runs");
  }
  const double mean = Mean(values);
  return {mean, std::sqrt(SampleVariance(values, mean))};
}

std::array<MeanStd, 6> Aggregate(const RunSet& runs) {
  std::array<MeanStd, 6> out;
  for (size_t m = 0; m < out.size(); ++m) {
    std::vector<double> values;
    for (const auto& r : runs.reports) values.push_back(r.Get(m));
    out[m] = MeanAndSampleStd(values);
  }
  return out;
}

double StudentTwoSidedP(double t, double df) {
  if (!(df > 0)) throw Error(ErrorCode::kDomain, "t distribution needs df > 0");
  if (std::isinf(t)) return 0;
  const double x = df / (df + t * t);
  return boost::math::ibeta(df / 2.0, 0.5, x);
}

TestVerdict TTest(std::span<const double> a, std::span<const double> b,
                  double alpha, TTestKind kind) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "t-test needs at least two runs per side");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = Mean(a);
  const double mb = Mean(b);
  switch (kind) {
    case TTestKind::kPooled: {
      const double df = na + nb - 2;
      const double pooled =
          ((na - 1) * SampleVariance(a, ma) + (nb - 1) * SampleVariance(b, mb)) / df;
      return FromStatistic(ma - mb, std::sqrt(pooled * (1 / na + 1 / nb)), df, alpha);
    }
    case TTestKind::kWelch: {
      const double va = SampleVariance(a, ma) / na;
      const double vb = SampleVariance(b, mb) / nb;
      const double se2 = va + vb;
      const double df =
          se2 == 0 ? na + nb - 2
                   : se2 * se2 / (va * va / (na - 1) + vb * vb / (nb - 1));
      return FromStatistic(ma - mb, std::sqrt(se2), df, alpha);
    }
    case TTestKind::kPaired: {
      if (a.size() != b.size()) {
        throw Error(ErrorCode::kInvalidArgument, "paired t-test needs equal lengths");
      }
      std::vector<double> d(a.size());
      for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
      const double md = Mean(d);
      return FromStatistic(md, std::sqrt(SampleVariance(d, md) / na), na - 1, alpha);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown t-test kind");
}

std::vector<PairVerdicts> CompareModels(std::span<const RunSet> runs, double alpha,
                                        TTestKind kind) {
  for (const auto& r : runs) {
    if (r.seeds.size() != r.reports.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{}: {} seeds but {} reports", r.model_name,
                              r.seeds.size(), r.reports.size()));
    }
    if (r.seeds != runs.front().seeds) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{} and {} were run on different seeds",
                              runs.front().model_name, r.model_name));
    }
  }
  std::vector<PairVerdicts> out;
  for (size_t i = 0; i < runs.size(); ++i) {
    for (size_t j = i + 1; j < runs.size(); ++j) {
      PairVerdicts pair{runs[i].model_name, runs[j].model_name, {}};
      for (size_t m = 0; m < pair.verdicts.size(); ++m) {
        std::vector<double> a, b;
        for (const auto& r : runs[i].reports) a.push_back(r.Get(m));
        for (const auto& r : runs[j].reports) b.push_back(r.Get(m));
        pair.verdicts[m] = TTest(a, b, alpha, kind);
        pair.verdicts[m].metric = MetricsReport::kMetricNames[m];
      }
      out.push_back(std::move(pair));
    }
  }
  return out;
}

const char* TTestKindName(TTestKind kind) {
  switch (kind) {
    case TTestKind::kPooled: return "pooled";
    case TTestKind::kWelch: return "welch";
    case TTestKind::kPaired: return "paired";
  }
  return "unknown";
}

}  // namespace helprank
