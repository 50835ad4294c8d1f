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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "helprank/error.h"
#include "helprank/forest.h"
#include "helprank/rng.h"
#include "oracles.h"

namespace helprank {
namespace {

FeatureMatrix Matrix(size_t cols, std::vector<double> values) {
  FeatureMatrix m;
  for (size_t c = 0; c < cols; ++c) m.schema.push_back("f" + std::to_string(c));
  m.rows = values.size() / cols;
  m.values = std::move(values);
  return m;
}

ForestConfig Stump() {
  ForestConfig c;
  c.n_estimators = 1;
  c.max_depth = 1;
  c.bootstrap = false;
  return c;
}

TEST(ForestTest, DefaultGridShape) {
  const auto grid = DefaultGrid(5);
  ASSERT_EQ(grid.size(), 16u);
  EXPECT_EQ(grid[0].n_estimators, 200);
  EXPECT_EQ(grid[0].max_features, MaxFeatures::kAll);
  EXPECT_EQ(grid[0].max_depth, 10);
  EXPECT_EQ(grid[0].min_samples_leaf, 10);
  EXPECT_EQ(grid[1].min_samples_leaf, 50);
  EXPECT_EQ(grid[2].max_depth, std::nullopt);
  EXPECT_EQ(grid[4].max_features, MaxFeatures::kSqrt);
  EXPECT_EQ(grid[8].n_estimators, 400);
  for (const auto& c : grid) EXPECT_EQ(c.seed, 5u);
}

TEST(ForestTest, ValidateRejectsBadConfigs) {
  ForestConfig c;
  c.n_estimators = 0;
  EXPECT_THROW(c.Validate(), Error);
  c = ForestConfig{};
  c.min_samples_leaf = 0;
  EXPECT_THROW(c.Validate(), Error);
  c = ForestConfig{};
  c.max_depth = -1;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(ForestTest, StumpOnStepFunction) {
  const FeatureMatrix x = Matrix(1, {1, 2, 3, 4, 5, 6});
  const std::vector<double> y = {0, 0, 0, 1, 1, 1};
  const ForestModel m = FitForest(x, y, Stump());
  ASSERT_EQ(m.trees.size(), 1u);
  const auto& root = m.trees[0].nodes[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_EQ(root.threshold, 3.5);
  EXPECT_EQ(PredictForest(m, Matrix(1, {3.5, 3.6})), (std::vector<double>{0, 1}));
}

TEST(ForestTest, StumpMatchesOracleOnRandomData) {
  Xoshiro256 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 2 + rng.Below(31);
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
      xs[i] = static_cast<double>(rng.Below(10)) * 0.3 - 1;
      ys[i] = static_cast<double>(rng.Below(17)) / 16;
    }
    const int min_leaf = 1 + static_cast<int>(rng.Below(3));
    ForestConfig c = Stump();
    c.min_samples_leaf = min_leaf;
    const ForestModel m = FitForest(Matrix(1, xs), ys, c);
    const oracle::StumpOracle o = oracle::BestStump(xs, ys, min_leaf, 16);
    const Tree& t = m.trees[0];
    ASSERT_EQ(t.nodes.size() > 1, o.split) << "trial " << trial;
    EXPECT_DOUBLE_EQ(t.nodes[0].value, o.root_value);
    if (o.split) {
      EXPECT_EQ(t.nodes[0].threshold, o.threshold) << "trial " << trial;
      EXPECT_DOUBLE_EQ(t.nodes[t.nodes[0].left].value, o.left_value);
      EXPECT_DOUBLE_EQ(t.nodes[t.nodes[0].right].value, o.right_value);
    }
  }
}

TEST(ForestTest, DeepTreeInterpolatesTrainingData) {
  const FeatureMatrix x = Matrix(2, {0, 0, 0, 1, 1, 0, 1, 1});
  const std::vector<double> y = {0.1, 0.2, 0.3, 0.4};
  ForestConfig c;
  c.n_estimators = 1;
  c.bootstrap = false;
  const ForestModel m = FitForest(x, y, c);
  const auto p = PredictForest(m, x);
  for (size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(p[i], y[i]);
}

TEST(ForestTest, RespectsDepthAndLeafSize) {
  Xoshiro256 rng(2);
  std::vector<double> xs, ys;
  for (int i = 0; i < 200; ++i) {
    const double a = rng.Uniform(), b = rng.Uniform();
    xs.push_back(a);
    xs.push_back(b);
    ys.push_back(a * b);
  }
  ForestConfig c;
  c.n_estimators = 5;
  c.max_depth = 3;
  c.min_samples_leaf = 10;
  const ForestModel m = FitForest(Matrix(2, xs), ys, c);
  for (const auto& t : m.trees) {
    EXPECT_LE(t.Depth(), 3);
    for (const auto& node : t.nodes) {
      if (node.feature < 0) EXPECT_GE(node.samples, 10);
    }
  }
}

TEST(ForestTest, DeterministicAcrossThreadsAndRowOrder) {
  Xoshiro256 rng(8);
  std::vector<double> xs, ys;
  for (int i = 0; i < 120; ++i) {
    for (int f = 0; f < 4; ++f) xs.push_back(rng.Uniform());
    ys.push_back(rng.Uniform());
  }
  ForestConfig c;
  c.n_estimators = 12;
  c.max_features = MaxFeatures::kSqrt;
  c.seed = 3;
  const FeatureMatrix x = Matrix(4, xs);
  const ForestModel a = FitForest(x, ys, c, 1);
  const ForestModel b = FitForest(x, ys, c, 4);
  EXPECT_EQ(a.ToJson(), b.ToJson());
  // Reverse the rows.
  std::vector<double> rx, ry(ys.rbegin(), ys.rend());
  for (size_t r = 120; r-- > 0;) {
    for (int f = 0; f < 4; ++f) rx.push_back(xs[r * 4 + f]);
  }
  const ForestModel r = FitForest(Matrix(4, rx), ry, c, 2);
  EXPECT_EQ(PredictForest(a, x), PredictForest(r, x));
  c.seed = 4;
  EXPECT_NE(PredictForest(FitForest(x, ys, c), x), PredictForest(a, x));
}

TEST(ForestTest, ModelJsonRoundTrip) {
  const FeatureMatrix x = Matrix(1, {1, 2, 3, 4, 5, 6, 7, 8});
  const std::vector<double> y = {0.1, 0.3, 0.2, 0.8, 0.9, 0.7, 0.1, 0.05};
  ForestConfig c;
  c.n_estimators = 3;
  const ForestModel m = FitForest(x, y, c);
  const ForestModel back = ForestModel::FromJson(m.ToJson());
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.fingerprint, m.fingerprint);
  EXPECT_EQ(PredictForest(back, x), PredictForest(m, x));
  EXPECT_THROW(ForestModel::FromJson(R"({"format": "other"})"), Error);
}

TEST(ForestTest, SchemaMismatchOnPredict) {
  const ForestModel m = FitForest(Matrix(1, {1, 2, 3}), std::vector<double>{0, 1, 0}, Stump());
  try {
    PredictForest(m, Matrix(2, {1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(ForestTest, GridSearchPicksLowestValidationError) {
  Xoshiro256 rng(4);
  std::vector<double> xs, ys, vx, vy;
  for (int i = 0; i < 150; ++i) {
    const double a = rng.Uniform();
    xs.push_back(a);
    ys.push_back(a > 0.5 ? 0.9 : 0.1);
  }
  for (int i = 0; i < 50; ++i) {
    const double a = rng.Uniform();
    vx.push_back(a);
    vy.push_back(a > 0.5 ? 0.9 : 0.1);
  }
  ForestConfig shallow;
  shallow.n_estimators = 5;
  shallow.max_depth = 1;
  shallow.min_samples_leaf = 100;  // cannot split 150 rows into two leaves of 100
  ForestConfig good = shallow;
  good.min_samples_leaf = 5;
  const std::vector<ForestConfig> grid = {shallow, good, good};
  const GridSearchResult r = GridSearch(Matrix(1, xs), ys, Matrix(1, vx), vy, grid);
  ASSERT_EQ(r.val_rmse.size(), 3u);
  EXPECT_EQ(r.best, good);
  EXPECT_LT(r.val_rmse[1], r.val_rmse[0]);
  EXPECT_EQ(r.val_rmse[1], r.val_rmse[2]);
  EXPECT_THROW(GridSearch(Matrix(1, xs), ys, Matrix(1, {}), {}, grid), Error);
}

TEST(ForestTest, NonFiniteInputRejected) {
  EXPECT_THROW(FitForest(Matrix(1, {1, NAN}), std::vector<double>{0, 1}, Stump()), Error);
}

}  // namespace
}  // namespace helprank
