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

#include "helprank/forest.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "helprank/error.h"
#include "helprank/io_util.h"
#include "helprank/metrics.h"
#include "helprank/parallel.h"
#include "helprank/rng.h"
#include "json.hpp"

namespace helprank {
namespace {

using nlohmann::json;

constexpr int kForestFormatVersion = 1;

size_t FloorSqrt(size_t d) {
  size_t k = 0;
  while ((k + 1) * (k + 1) <= d) ++k;
  return k;
}

// Builds one tree over rows of a canonically ordered matrix. `rows` holds the
// (possibly repeated) training row indices, ascending.
class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const double> y,
              const ForestConfig& config, uint64_t seed)
      : x_(x), y_(y), config_(config), rng_(seed) {
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
    num_candidates_ = config.max_features == MaxFeatures::kSqrt
                          ? std::max<size_t>(1, FloorSqrt(x.cols()))
                          : x.cols();
  }

  Tree Build(std::vector<int> rows) {
    rows_ = std::move(rows);
    order_.resize(rows_.size());
    Grow(0, rows_.size(), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0;
    double proxy = -std::numeric_limits<double>::infinity();
  };

  double X(int row, int feature) const {
    return x_.values[static_cast<size_t>(row) * x_.cols() + feature];
  }

  int Grow(size_t begin, size_t end, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const size_t n = end - begin;
    double sum = 0;
    bool constant_target = true;
    for (size_t i = begin; i < end; ++i) {
      sum += y_[rows_[i]];
      constant_target = constant_target && y_[rows_[i]] == y_[rows_[begin]];
    }
    {
      Tree::Node& node = tree_.nodes[id];
      node.value = sum / static_cast<double>(n);
      node.samples = static_cast<int>(n);
      node.depth = depth;
    }
    const size_t min_leaf = static_cast<size_t>(config_.min_samples_leaf);
    if (constant_target || n < 2 * min_leaf ||
        (config_.max_depth && depth >= *config_.max_depth)) {
      return id;
    }
    const Split split = FindSplit(begin, end, sum);
    if (split.feature < 0) return id;

    auto mid = std::stable_partition(
        rows_.begin() + begin, rows_.begin() + end,
        [&](int r) { return X(r, split.feature) <= split.threshold; });
    const size_t middle = static_cast<size_t>(mid - rows_.begin());
    const int left = Grow(begin, middle, depth + 1);
    const int right = Grow(middle, end, depth + 1);
    Tree::Node& node = tree_.nodes[id];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  std::vector<int> Candidates() {
    if (num_candidates_ == features_.size()) return features_;
    // Partial Fisher-Yates: the first num_candidates_ slots become a uniform
    // sample without replacement.
    for (size_t i = 0; i < num_candidates_; ++i) {
      const size_t j = i + rng_.Below(features_.size() - i);
      std::swap(features_[i], features_[j]);
    }
    std::vector<int> picked(features_.begin(), features_.begin() + num_candidates_);
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  // Maximizes sum_L^2/n_L + sum_R^2/n_R, which is equivalent to minimizing the
  // children's summed squared error. A candidate must beat the incumbent by
  // a relative 1e-12 so that rounding noise cannot reorder exact ties; ties go
  // to the lower feature index, then the lower threshold.
  Split FindSplit(size_t begin, size_t end, double total) {
    const size_t n = end - begin;
    const size_t min_leaf = static_cast<size_t>(config_.min_samples_leaf);
    Split best;
    for (int f : Candidates()) {
      std::copy(rows_.begin() + begin, rows_.begin() + end, order_.begin());
      std::stable_sort(order_.begin(), order_.begin() + n,
                       [&](int a, int b) { return X(a, f) < X(b, f); });
      double left_sum = 0;
      for (size_t i = 0; i + 1 < n; ++i) {
        left_sum += y_[order_[i]];
        const double lo = X(order_[i], f);
        const double hi = X(order_[i + 1], f);
        if (lo == hi) continue;
        const size_t n_left = i + 1;
        const size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double proxy = left_sum * left_sum / static_cast<double>(n_left) +
                             right_sum * right_sum / static_cast<double>(n_right);
        const double margin = 1e-12 * std::max(1.0, std::abs(best.proxy));
        if (best.feature < 0 || proxy > best.proxy + margin) {
          double threshold = lo / 2 + hi / 2;
          if (threshold >= hi) threshold = lo;
          best = {f, threshold, proxy};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const double> y_;
  const ForestConfig& config_;
  Xoshiro256 rng_;
  std::vector<int> features_;
  size_t num_candidates_ = 0;
  std::vector<int> rows_;
  std::vector<int> order_;
  Tree tree_;
};

json ConfigToJson(const ForestConfig& c) {
  json j;
  j["n_estimators"] = c.n_estimators;
  j["max_features"] = c.max_features == MaxFeatures::kAll ? "all" : "sqrt";
  j["max_depth"] = c.max_depth ? json(*c.max_depth) : json(nullptr);
  j["min_samples_leaf"] = c.min_samples_leaf;
  j["seed"] = c.seed;
  j["bootstrap"] = c.bootstrap;
  return j;
}

ForestConfig ConfigFromJson(const json& j) {
  ForestConfig c;
  c.n_estimators = j.at("n_estimators").get<int>();
  const auto mf = j.at("max_features").get<std::string>();
  if (mf == "all" || mf == "auto") {
    c.max_features = MaxFeatures::kAll;
  } else if (mf == "sqrt") {
    c.max_features = MaxFeatures::kSqrt;
  } else {
    throw Error(ErrorCode::kParse, "max_features must be all, auto or sqrt");
  }
  if (!j.at("max_depth").is_null()) c.max_depth = j.at("max_depth").get<int>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  c.seed = j.value("seed", uint64_t{0});
  c.bootstrap = j.value("bootstrap", true);
  c.Validate();
  return c;
}

}  // namespace

void ForestConfig::Validate() const {
  if (n_estimators < 1 || min_samples_leaf < 1 || (max_depth && *max_depth < 1)) {
    throw Error(ErrorCode::kInvalidArgument,
                "forest config requires n_estimators >= 1, min_samples_leaf >= 1 "
                "and max_depth >= 1 when bounded");
  }
}

std::string ForestConfig::Describe() const {
  return fmt::format("n_estimators={} max_features={} max_depth={} min_samples_leaf={}",
                     n_estimators, max_features == MaxFeatures::kAll ? "all" : "sqrt",
                     max_depth ? std::to_string(*max_depth) : "None",
                     min_samples_leaf);
}

std::vector<ForestConfig> DefaultGrid(uint64_t seed) {
  std::vector<ForestConfig> grid;
  for (int n_estimators : {200, 400}) {
    for (MaxFeatures mf : {MaxFeatures::kAll, MaxFeatures::kSqrt}) {
      for (std::optional<int> depth : {std::optional<int>(10), std::optional<int>()}) {
        for (int min_leaf : {10, 50}) {
          ForestConfig c;
          c.n_estimators = n_estimators;
          c.max_features = mf;
          c.max_depth = depth;
          c.min_samples_leaf = min_leaf;
          c.seed = seed;
          grid.push_back(c);
        }
      }
    }
  }
  return grid;
}

double Tree::Predict(std::span<const double> x) const {
  int id = 0;
  while (nodes[id].feature >= 0) {
    const Node& node = nodes[id];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[id].value;
}

int Tree::Depth() const {
  int depth = 0;
  for (const auto& node : nodes) depth = std::max(depth, node.depth);
  return depth;
}

ForestModel FitForest(const FeatureMatrix& x, std::span<const double> y,
                      const ForestConfig& config, int threads) {
  config.Validate();
  if (x.rows == 0 || x.rows != y.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("forest needs matching non-empty X and y ({} vs {})",
                            x.rows, y.size()));
  }
  for (double v : x.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite feature value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite target");
  }

  std::vector<size_t> perm(x.rows);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
    auto ra = x.row(a);
    auto rb = x.row(b);
    if (!std::equal(ra.begin(), ra.end(), rb.begin())) {
      return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    }
    return y[a] < y[b];
  });
  FeatureMatrix cx;
  cx.schema = x.schema;
  cx.rows = x.rows;
  cx.values.reserve(x.values.size());
  std::vector<double> cy;
  cy.reserve(y.size());
  for (size_t i : perm) {
    auto r = x.row(i);
    cx.values.insert(cx.values.end(), r.begin(), r.end());
    cy.push_back(y[i]);
  }

  ForestModel model;
  model.config = config;
  model.schema = x.schema;
  {
    std::string bytes(reinterpret_cast<const char*>(cx.values.data()),
                      cx.values.size() * sizeof(double));
    bytes.append(reinterpret_cast<const char*>(cy.data()), cy.size() * sizeof(double));
    bytes += std::to_string(config.seed);
    model.fingerprint = Sha256Hex(bytes);
  }
  model.trees.resize(static_cast<size_t>(config.n_estimators));
  const int n = static_cast<int>(cx.rows);
  ParallelFor(model.trees.size(), threads, [&](size_t t) {
    const uint64_t seed = DeriveSeed(config.seed, t);
    std::vector<int> rows(n);
    if (config.bootstrap) {
      Xoshiro256 sampler(seed ^ 0xB0075712A9ULL);
      for (auto& r : rows) r = static_cast<int>(sampler.Below(n));
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    model.trees[t] = TreeBuilder(cx, cy, config, seed).Build(std::move(rows));
  });
  return model;
}

std::vector<double> PredictForest(const ForestModel& model, const FeatureMatrix& x) {
  if (x.schema != model.schema) {
    throw Error(ErrorCode::kSchemaMismatch,
                "prediction features do not match the forest's training schema");
  }
  std::vector<double> out(x.rows, 0.0);
  for (size_t r = 0; r < x.rows; ++r) {
    double sum = 0;
    for (const auto& tree : model.trees) sum += tree.Predict(x.row(r));
    out[r] = sum / static_cast<double>(model.trees.size());
  }
  return out;
}

GridSearchResult GridSearch(const FeatureMatrix& train_x,
                            std::span<const double> train_y,
                            const FeatureMatrix& val_x,
                            std::span<const double> val_y,
                            std::span<const ForestConfig> grid, int threads) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty hyperparameter grid");
  if (val_x.rows == 0) throw Error(ErrorCode::kInvalidArgument, "empty validation set");
  GridSearchResult result;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    ForestModel model = FitForest(train_x, train_y, grid[i], threads);
    const double rmse = Rmse(val_y, PredictForest(model, val_x));
    result.val_rmse.push_back(rmse);
    if (i == 0 || rmse < best_rmse) {
      best_rmse = rmse;
      result.best = grid[i];
      result.model = std::move(model);
    }
  }
  return result;
}

std::string ForestModel::ToJson() const {
  json j;
  j["format"] = "helprank-forest";
  j["version"] = kForestFormatVersion;
  j["config"] = ConfigToJson(config);
  j["schema"] = schema;
  j["fingerprint"] = fingerprint;
  json trees_json = json::array();
  for (const auto& tree : trees) {
    json t;
    std::vector<int> feature, left, right, samples;
    std::vector<double> threshold, value;
    for (const auto& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
      samples.push_back(node.samples);
    }
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["left"] = left;
    t["right"] = right;
    t["value"] = value;
    t["samples"] = samples;
    trees_json.push_back(std::move(t));
  }
  j["trees"] = std::move(trees_json);
  return j.dump() + "\n";
}

ForestModel ForestModel::FromJson(std::string_view text) {
  ForestModel model;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "helprank-forest") {
      throw Error(ErrorCode::kFormat, "not a forest model file");
    }
    if (j.at("version").get<int>() != kForestFormatVersion) {
      throw Error(ErrorCode::kFormat, "unsupported forest model version");
    }
    model.config = ConfigFromJson(j.at("config"));
    model.schema = j.at("schema").get<std::vector<std::string>>();
    model.fingerprint = j.at("fingerprint").get<std::string>();
    for (const auto& t : j.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const auto samples = t.at("samples").get<std::vector<int>>();
      const size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n ||
          value.size() != n || samples.size() != n || n == 0) {
        throw Error(ErrorCode::kFormat, "inconsistent tree arrays");
      }
      Tree tree;
      tree.nodes.resize(n);
      for (size_t i = 0; i < n; ++i) {
        auto& node = tree.nodes[i];
        node.feature = feature[i];
        node.threshold = threshold[i];
        node.left = left[i];
        node.right = right[i];
        node.value = value[i];
        node.samples = samples[i];
        const int nn = static_cast<int>(n);
        if (node.feature >= static_cast<int>(model.schema.size()) ||
            (node.feature >= 0 && (node.left <= static_cast<int>(i) || node.left >= nn ||
                                   node.right <= static_cast<int>(i) || node.right >= nn))) {
          throw Error(ErrorCode::kFormat, "tree node references out of range");
        }
      }
      for (size_t i = 0; i < n; ++i) {
        const auto& node = tree.nodes[i];
        if (node.feature >= 0) {
          tree.nodes[node.left].depth = node.depth + 1;
          tree.nodes[node.right].depth = node.depth + 1;
        }
      }
      model.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad forest model: ") + e.what());
  }
  return model;
}

}  // namespace helprank
