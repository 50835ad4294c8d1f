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


#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "helprank/error.h"
#include "helprank/head.h"
#include "helprank/rng.h"
#include "oracles.h"

namespace helprank {
namespace {

HeadConfig Small(bool side) {
  HeadConfig c;
  c.input_dim = 5;
  c.hidden_dim = 4;
  c.use_side_features = side;
  c.seed = 21;
  return c;
}

HeadData RandomData(size_t n, size_t dim, bool side, uint64_t seed) {
  Xoshiro256 rng(seed);
  HeadData d;
  d.dim = dim;
  for (size_t i = 0; i < n; ++i) {
    d.ids.push_back("r" + std::to_string(i));
    for (size_t j = 0; j < dim; ++j) d.embeddings.push_back(static_cast<float>(rng.Uniform(-1, 1)));
    if (side) {
      d.side.push_back(rng.Uniform(-2, 2));
      d.side.push_back(rng.Uniform(-2, 2));
    }
    d.targets.push_back(rng.Uniform());
  }
  return d;
}

TEST(HeadTest, ParamCounts) {
  EXPECT_EQ(ParamCount(Small(false)), 6u);
  EXPECT_EQ(ParamCount(Small(true)), 4u * 7 + 4 + 4 + 1);
  HeadConfig defaults;
  EXPECT_EQ(ParamCount(defaults), 769u);
}

TEST(HeadTest, InitWithinFanInBounds) {
  const HeadModel m = InitHead(Small(true));
  const size_t w1 = 4 * 7 + 4;
  for (size_t i = 0; i < m.params.size(); ++i) {
    const double bound = i < w1 ? 1 / std::sqrt(7.0) : 0.5;
    EXPECT_LE(std::abs(m.params[i]), bound);
  }
  EXPECT_EQ(InitHead(Small(true)).params, m.params);
  HeadConfig other = Small(true);
  other.seed = 22;
  EXPECT_NE(InitHead(other).params, m.params);
}

TEST(HeadTest, ForwardMatchesDenseOracle) {
  for (bool side : {false, true}) {
    const HeadModel m = InitHead(Small(side));
    const HeadData d = RandomData(10, 5, side, 3);
    for (size_t i = 0; i < d.size(); ++i) {
      const auto e = d.embedding(i);
      const std::vector<double> x(e.begin(), e.end());
      EXPECT_NEAR(Forward(m, x, d.side_row(i)),
                  oracle::DenseHeadForward(m.config, m.params, x, d.side_row(i)), 1e-14);
    }
  }
}

TEST(HeadTest, PredictClamps) {
  HeadModel m = InitHead(Small(false));
  std::fill(m.params.begin(), m.params.end(), 0.0);
  m.params.back() = 3.0;
  const std::vector<double> x(5, 0.0);
  EXPECT_EQ(Forward(m, x), 3.0);
  EXPECT_EQ(Predict(m, x), 1.0);
  m.params.back() = -0.5;
  EXPECT_EQ(Predict(m, x), 0.0);
}

TEST(HeadTest, SchemaMismatch) {
  const HeadModel text = InitHead(Small(false));
  const HeadModel side = InitHead(Small(true));
  const std::vector<double> x(5, 0.1), bad(4, 0.1), s(2, 0.0);
  EXPECT_THROW(Forward(text, bad), Error);
  EXPECT_THROW(Forward(text, x, s), Error);
  EXPECT_THROW(Forward(side, x), Error);
}

TEST(HeadTest, GradientMatchesFiniteDifferences) {
  for (bool side : {false, true}) {
    const HeadModel m = InitHead(Small(side));
    const HeadData d = RandomData(7, 5, side, 11);
    std::vector<size_t> rows(d.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> grad;
    const double loss = BatchLossAndGradient(m, d, rows, grad);
    EXPECT_NEAR(loss, BatchLoss(m, d, rows), 1e-15);
    const auto fd = oracle::FiniteDifferenceGradient(m, d, rows, 1e-6);
    ASSERT_EQ(grad.size(), fd.size());
    for (size_t i = 0; i < grad.size(); ++i) EXPECT_NEAR(grad[i], fd[i], 1e-7);
  }
}

TEST(HeadTest, AdamFirstStepMovesByLr) {
  // With bias correction the first update is lr * sign(g) (up to eps).
  std::vector<double> p = {1.0, -1.0, 0.5};
  const std::vector<double> g = {0.3, -2.0, 0.0};
  AdamState s;
  AdamStep(p, g, s, 0.01, 0.9, 0.999, 1e-8);
  EXPECT_NEAR(p[0], 0.99, 1e-9);
  EXPECT_NEAR(p[1], -0.99, 1e-9);
  EXPECT_EQ(p[2], 0.5);
  EXPECT_EQ(s.step, 1);
}

TEST(HeadTest, AdamRejectsNonFiniteGradient) {
  std::vector<double> p = {1.0, 2.0};
  const std::vector<double> g = {0.1, std::numeric_limits<double>::infinity()};
  AdamState s;
  try {
    AdamStep(p, g, s, 0.01, 0.9, 0.999, 1e-8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
  EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(s.step, 0);
}

TEST(HeadTest, LrSchedule) {
  HeadConfig c;
  c.epochs = 5;
  c.peak_lr = 1e-4;
  EXPECT_EQ(LrAt(0, 10, c), 0.0);
  EXPECT_NEAR(LrAt(5, 10, c), 5e-5, 1e-20);
  EXPECT_EQ(LrAt(10, 10, c), 1e-4);
  EXPECT_NEAR(LrAt(30, 10, c), 5e-5, 1e-20);
  EXPECT_EQ(LrAt(50, 10, c), 0.0);
  EXPECT_EQ(LrAt(60, 10, c), 0.0);
}

TEST(HeadTest, TrainingIsDeterministicAndLogsEveryEpoch) {
  HeadConfig c = Small(true);
  c.epochs = 3;
  c.batch_size = 4;
  c.peak_lr = 1e-2;
  const HeadData train = RandomData(30, 5, true, 1);
  const HeadData val = RandomData(10, 5, true, 2);
  const TrainResult a = TrainHead(train, val, c);
  const TrainResult b = TrainHead(train, val, c);
  EXPECT_EQ(a.model.params, b.model.params);
  EXPECT_EQ(a.log.ToCsv(), b.log.ToCsv());
  EXPECT_EQ(a.log.val_rmse.size(), 3u);
  EXPECT_EQ(a.log.lr.size(), 3u * 8);
  const auto best = std::min_element(a.log.val_rmse.begin(), a.log.val_rmse.end());
  EXPECT_EQ(a.log.best_epoch, best - a.log.val_rmse.begin());
}

TEST(HeadTest, TrainRejectsWrongInputs) {
  const HeadData train = RandomData(10, 5, false, 1);
  const HeadData empty;
  EXPECT_THROW(TrainHead(train, empty, Small(false)), Error);
  EXPECT_THROW(TrainHead(train, train, Small(true)), Error);
}

TEST(HeadTest, ModelJsonRoundTrip) {
  for (bool side : {false, true}) {
    const HeadModel m = InitHead(Small(side));
    const HeadModel back = HeadModel::FromJson(m.ToJson());
    EXPECT_EQ(back.params, m.params);
    EXPECT_EQ(back.config.use_side_features, side);
    EXPECT_EQ(back.config.input_dim, 5u);
  }
  EXPECT_THROW(HeadModel::FromJson("{}"), Error);
}

}  // namespace
}  // namespace helprank
