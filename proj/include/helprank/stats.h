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

#ifndef HELPRANK_STATS_H_
#define HELPRANK_STATS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "helprank/metrics.h"

namespace helprank {

// One model's reports across split seeds; reports[i] belongs to seeds[i].
struct RunSet {
  std::string model_name;
  std::vector<uint64_t> seeds;
  std::vector<MetricsReport> reports;
};

struct MeanStd {
  double mean = 0;
  double std = 0;  // sample (n - 1) standard deviation
};

// Requires at least two values.
MeanStd MeanAndSampleStd(std::span<const double> values);

// Per metric, in MetricsReport::kMetricNames order.
std::array<MeanStd, 6> Aggregate(const RunSet& runs);

enum class TTestKind {
  kPooled,  // equal-variance two-sample test
  kWelch,   // unequal variances, Welch-Satterthwaite df
  kPaired,  // on per-seed differences
};

struct TestVerdict {
  std::string metric;
  double t_statistic = 0;
  double df = 0;
  double p_value = 1;
  bool significant = false;  // p_value < alpha
};

// Two-sided p-value of Student's t with `df` degrees of freedom:
// I_{df/(df+t^2)}(df/2, 1/2).
double StudentTwoSidedP(double t, double df);

// Zero standard error: equal means give t = 0, p = 1; different means give
// t = +/-inf, p = 0.
TestVerdict TTest(std::span<const double> a, std::span<const double> b,
                  double alpha = 0.05, TTestKind kind = TTestKind::kPooled);

struct PairVerdicts {
  std::string model_a;
  std::string model_b;
  std::array<TestVerdict, 6> verdicts;
};

// One row per unordered model pair (i < j in input order). All run sets must
// list the same seeds in the same order.
std::vector<PairVerdicts> CompareModels(std::span<const RunSet> runs,
                                        double alpha = 0.05,
                                        TTestKind kind = TTestKind::kPooled);

const char* TTestKindName(TTestKind kind);

}  // namespace helprank

#endif  // HELPRANK_STATS_H_
