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

#ifndef HELPRANK_FOREST_H_
#define HELPRANK_FOREST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "helprank/features.h"

namespace helprank {

enum class MaxFeatures { kAll, kSqrt };

struct ForestConfig {
  int n_estimators = 100;
  MaxFeatures max_features = MaxFeatures::kAll;
  std::optional<int> max_depth;  // nullopt: unlimited
  int min_samples_leaf = 1;
  uint64_t seed = 0;
  // Off only for diagnostics: every tree then sees the full training set.
  bool bootstrap = true;

  void Validate() const;
  std::string Describe() const;
  bool operator==(const ForestConfig&) const = default;
};

// The 2 x 2 x 2 x 2 grid: n_estimators {200, 400}, max_features {all, sqrt},
// max_depth {10, unlimited}, min_samples_leaf {10, 50}; the last key varies
// fastest.
std::vector<ForestConfig> DefaultGrid(uint64_t seed);

// Flattened CART regression tree. Rows with x[feature] <= threshold go left.
struct Tree {
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;  // mean target of the training samples in the node
    int samples = 0;   // bootstrap multiplicity included
    int depth = 0;
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> x) const;
  int Depth() const;
};

struct ForestModel {
  ForestConfig config;
  std::vector<std::string> schema;
  std::vector<Tree> trees;
  std::string fingerprint;  // sha256 over training data and seed

  std::string ToJson() const;
  static ForestModel FromJson(std::string_view json);
};

// Bagged variance-reduction trees. Rows are put in a canonical order
// (lexicographic on features, then target) before fitting, so the model does
// not depend on input row order. Tree t draws from the stream
// DeriveSeed(config.seed, t), so results are the same for any thread count.
ForestModel FitForest(const FeatureMatrix& x, std::span<const double> y,
                      const ForestConfig& config, int threads = 1);

std::vector<double> PredictForest(const ForestModel& model, const FeatureMatrix& x);

struct GridSearchResult {
  ForestConfig best;
  ForestModel model;
  std::vector<double> val_rmse;  // per grid entry
};

// Fits every config on train and keeps the lowest validation RMSE; the
// earliest config wins ties.
GridSearchResult GridSearch(const FeatureMatrix& train_x,
                            std::span<const double> train_y,
                            const FeatureMatrix& val_x,
                            std::span<const double> val_y,
                            std::span<const ForestConfig> grid, int threads = 1);

}  // namespace helprank

#endif  // HELPRANK_FOREST_H_
